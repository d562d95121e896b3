#include "sspd/efficiency_curve.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sspd {

namespace {

constexpr double kKnotTolerance = 1e-12;  // relative snap distance to a knot

bool at_knot(double x, double knot) {
    return std::abs(x - knot) <= kKnotTolerance * std::max(1.0, std::abs(knot));
}

}  // namespace

EfficiencyCurve EfficiencyCurve::from_absolute_points(const std::vector<Point>& absolute_points,
                                                      double operating_fraction,
                                                      std::vector<DarkPoint> dark_points) {
    if (absolute_points.size() < 2)
        throw std::invalid_argument("efficiency curve needs at least 2 points");
    if (!(operating_fraction > 0.0) || operating_fraction > 1.0)
        throw std::invalid_argument("operating bias fraction must lie in (0, 1]");

    EfficiencyCurve curve;
    curve.x_.reserve(absolute_points.size());
    curve.lnf_.reserve(absolute_points.size());
    double prev_x = 0.0;
    double prev_eff = 0.0;
    for (std::size_t i = 0; i < absolute_points.size(); ++i) {
        const auto& p = absolute_points[i];
        const std::string row = "efficiency curve point " + std::to_string(i + 1) + ": ";
        if (!(p.bias_fraction > 0.0) || p.bias_fraction > 1.0)
            throw std::invalid_argument(row + "bias fraction must lie in (0, 1]");
        if (i > 0 && !(p.bias_fraction > prev_x))
            throw std::invalid_argument(row + "bias fractions must be strictly increasing");
        if (!(p.value > 0.0) || p.value > 1.0)
            throw std::invalid_argument(row +
                                        "efficiency must lie in (0, 1] (drop zero rows; the "
                                        "curve already evaluates to 0 below its lowest point)");
        if (i > 0 && p.value < prev_eff)
            throw std::invalid_argument(row + "efficiencies must be non-decreasing");
        prev_x = p.bias_fraction;
        prev_eff = p.value;
        curve.x_.push_back(p.bias_fraction);
        curve.lnf_.push_back(std::log(p.value));
    }
    if (operating_fraction < curve.x_.front() && !at_knot(operating_fraction, curve.x_.front()))
        throw std::invalid_argument(
            "operating bias fraction lies below the lowest curve point; the curve does not "
            "cover the operating bias");

    for (std::size_t i = 0; i < dark_points.size(); ++i) {
        const std::string row = "dark-rate point " + std::to_string(i + 1) + ": ";
        if (!(dark_points[i].bias_fraction > 0.0) || dark_points[i].bias_fraction > 1.0)
            throw std::invalid_argument(row + "bias fraction must lie in (0, 1]");
        if (i > 0 && !(dark_points[i].bias_fraction > dark_points[i - 1].bias_fraction))
            throw std::invalid_argument(row + "bias fractions must be strictly increasing");
        if (dark_points[i].rate_hz < 0.0)
            throw std::invalid_argument(row + "dark rate must be non-negative");
    }
    curve.dark_ = std::move(dark_points);
    curve.operating_fraction_ = operating_fraction;

    // Shift in log space so that f(operating_fraction) == 1 exactly.
    const double shift = curve.log_relative(operating_fraction);
    for (double& l : curve.lnf_) l -= shift;
    return curve;
}

EfficiencyCurve EfficiencyCurve::two_point(double operating_fraction, double anchor_ratio,
                                           double anchor_relative) {
    if (!(operating_fraction > 0.0) || operating_fraction > 1.0)
        throw std::invalid_argument("operating bias fraction must lie in (0, 1]");
    if (!(anchor_ratio > 0.0) || !(anchor_ratio < 1.0))
        throw std::invalid_argument("anchor bias ratio must lie below the operating point");
    if (!(anchor_relative > 0.0) || !(anchor_relative < 1.0))
        throw std::invalid_argument("anchor relative efficiency must lie in (0, 1)");
    EfficiencyCurve curve;
    curve.x_ = {anchor_ratio * operating_fraction, operating_fraction};
    curve.lnf_ = {std::log(anchor_relative), 0.0};
    curve.operating_fraction_ = operating_fraction;
    return curve;
}

double EfficiencyCurve::log_relative(double x) const {
    for (std::size_t i = 0; i < x_.size(); ++i)
        if (at_knot(x, x_[i])) return lnf_[i];
    if (x < x_.front()) return -std::numeric_limits<double>::infinity();
    if (x > x_.back()) return lnf_.back();
    std::size_t hi = 1;
    while (x_[hi] < x) ++hi;
    const double t = (x - x_[hi - 1]) / (x_[hi] - x_[hi - 1]);
    return lnf_[hi - 1] + t * (lnf_[hi] - lnf_[hi - 1]);
}

double EfficiencyCurve::relative(double x) const {
    const double l = log_relative(x);
    if (l == -std::numeric_limits<double>::infinity()) return 0.0;
    return std::exp(l);
}

std::vector<EfficiencyCurve::Point> EfficiencyCurve::knots() const {
    std::vector<Point> pts;
    pts.reserve(x_.size());
    for (std::size_t i = 0; i < x_.size(); ++i) pts.push_back({x_[i], std::exp(lnf_[i])});
    return pts;
}

double EfficiencyCurve::dark_rate_at(double x) const {
    if (dark_.empty())
        throw std::logic_error("efficiency curve carries no dark-rate points");
    if (x <= dark_.front().bias_fraction) return dark_.front().rate_hz;
    if (x >= dark_.back().bias_fraction) return dark_.back().rate_hz;
    std::size_t hi = 1;
    while (dark_[hi].bias_fraction < x) ++hi;
    const auto& a = dark_[hi - 1];
    const auto& b = dark_[hi];
    const double t = (x - a.bias_fraction) / (b.bias_fraction - a.bias_fraction);
    return a.rate_hz + t * (b.rate_hz - a.rate_hz);
}

}  // namespace sspd
