#include "adacnp/models/predictor.hpp"

#include <utility>

#include "adacnp/errors.hpp"
#include "adacnp/models/adacnp.hpp"
#include "adacnp/models/cnp.hpp"

namespace adacnp::model {

BundlePredictor::BundlePredictor(ModelBundle bundle, ModelKind kind)
    : bundle_(std::move(bundle)), kind_(kind) {
    if (kind_ == ModelKind::kGp) {
        throw ContractError("BundlePredictor serves the CNP/AdaCNP paths, not the GP baseline");
    }
    bundle_.validate();
}

GaussianPrediction BundlePredictor::predict(const ContextSet& ctx,
                                            const TargetBatch& targets) const {
    if (kind_ == ModelKind::kAdaCnp) {
        return adacnp_predict(bundle_, ctx, targets).first;
    }
    return cnp_predict(bundle_, ctx, targets);
}

GaussianPrediction GpPredictor::predict(const ContextSet& ctx,
                                        const TargetBatch& targets) const {
    return gp_predict(cfg_, ctx, targets);
}

} // namespace adacnp::model
