#include "aoi/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace aoi::quad {
namespace {

Result integrate_piece(const std::function<double(double)>& f, double a, double b, double rel_tol) {
    if (!(b > a)) return {};
    double error = 0.0;
    double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, a, b, /*max_depth=*/20, rel_tol, &error);
    return {value, std::abs(error)};
}

}  // namespace

Result integrate(const std::function<double(double)>& f, double a, double b,
                 std::span<const double> breaks, double rel_tol) {
    std::vector<double> cuts{a};
    for (double x : breaks)
        if (x > a && x < b) cuts.push_back(x);
    std::sort(cuts.begin() + 1, cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    cuts.push_back(b);

    Result total;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        auto piece = integrate_piece(f, cuts[i], cuts[i + 1], rel_tol);
        total.value += piece.value;
        total.error += piece.error;
    }
    return total;
}

}  // namespace aoi::quad
