#pragma once

#include <cstddef>
#include <vector>

namespace sspd {

/// Relative detection efficiency f as a function of the bias fraction x = I_b / I_c.
///
/// The curve is stored as piecewise log-linear knots and is normalized at
/// construction so that f(operating fraction) == 1 exactly.  Evaluation below
/// the lowest knot returns 0 (no extrapolation of the steep low-bias tail);
/// evaluation above the highest knot holds the last value.  Queries within
/// 1e-12 relative distance of a knot are treated as exactly at that knot, so
/// anchor points are reproduced without interpolation noise.
class EfficiencyCurve {
public:
    struct Point {
        double bias_fraction;  // I / I_c
        double value;          // relative efficiency f (1 at the operating fraction)
    };
    struct DarkPoint {
        double bias_fraction;  // I / I_c
        double rate_hz;        // dark count rate at that bias
    };

    /// Build from absolute-efficiency samples (e.g. digitized measurement data).
    /// Points must have strictly increasing bias fractions in (0, 1], efficiencies
    /// in (0, 1] and non-decreasing; the operating fraction must be covered by the
    /// data (at or above the lowest point).  Normalization divides out the
    /// efficiency interpolated at `operating_fraction`.
    static EfficiencyCurve from_absolute_points(const std::vector<Point>& absolute_points,
                                                double operating_fraction,
                                                std::vector<DarkPoint> dark_points = {});

    /// Two-point parametric form: relative efficiency `anchor_relative` at bias
    /// `anchor_ratio` times the operating current, rising log-linearly to 1 at the
    /// operating point, zero below the anchor.
    static EfficiencyCurve two_point(double operating_fraction, double anchor_ratio,
                                     double anchor_relative);

    /// f(x) for x = I / I_c in [0, 1].
    double relative(double bias_fraction) const;

    double operating_fraction() const { return operating_fraction_; }
    double lowest_fraction() const { return x_.front(); }
    std::vector<Point> knots() const;

    bool has_dark_points() const { return !dark_.empty(); }
    /// Piecewise-linear dark rate vs bias fraction, clamped at the ends.
    double dark_rate_at(double bias_fraction) const;

private:
    EfficiencyCurve() = default;
    double log_relative(double bias_fraction) const;  // ln f, or -inf below the lowest knot

    std::vector<double> x_;    // knot bias fractions, strictly increasing
    std::vector<double> lnf_;  // ln relative efficiency at the knots
    std::vector<DarkPoint> dark_;
    double operating_fraction_ = 0.0;
};

}  // namespace sspd
