#pragma once

#include <vector>

#include "adacnp/numeric/matrix.hpp"

namespace adacnp {

// Per-feature affine transform fit on historical data only. scale entries of
// degenerate (constant) features are forced to 1 so the transform stays
// invertible.
struct Standardization {
    std::vector<double> x_mean, x_scale;
    std::vector<double> y_mean, y_scale;

    static Standardization fit(const num::Matrix& x, const num::Matrix& y);

    void apply_x(num::Matrix& x) const;
    void apply_y(num::Matrix& y) const;
    void invert_y(num::Matrix& y) const;
    // De-standardizes a variance matrix (multiplies by scale squared).
    void invert_y_variance(num::Matrix& var) const;
    void invert_x(num::Matrix& x) const;
};

} // namespace adacnp
