#pragma once

#include <memory>

#include "adacnp/models/bundle.hpp"
#include "adacnp/models/gp.hpp"
#include "adacnp/models/types.hpp"

namespace adacnp::model {

// Uniform conditional-predictor surface over the CNP, AdaCNP and GP paths.
// Implementations are immutable after construction and safe to call from
// multiple threads concurrently.
class ConditionalPredictor {
public:
    virtual ~ConditionalPredictor() = default;
    virtual GaussianPrediction predict(const ContextSet& ctx,
                                       const TargetBatch& targets) const = 0;
    virtual ModelKind kind() const = 0;
};

class BundlePredictor final : public ConditionalPredictor {
public:
    BundlePredictor(ModelBundle bundle, ModelKind kind);
    GaussianPrediction predict(const ContextSet& ctx, const TargetBatch& targets) const override;
    ModelKind kind() const override { return kind_; }
    const ModelBundle& bundle() const { return bundle_; }

private:
    ModelBundle bundle_;
    ModelKind kind_;
};

class GpPredictor final : public ConditionalPredictor {
public:
    explicit GpPredictor(GpConfig cfg) : cfg_(cfg) { cfg_.validate(); }
    GaussianPrediction predict(const ContextSet& ctx, const TargetBatch& targets) const override;
    ModelKind kind() const override { return ModelKind::kGp; }
    const GpConfig& config() const { return cfg_; }

private:
    GpConfig cfg_;
};

} // namespace adacnp::model
