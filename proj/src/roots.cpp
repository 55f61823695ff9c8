#include "seqtest/roots.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "seqtest/errors.hpp"

namespace seqtest::roots {

namespace {

double width_limit(double lo, double hi, double tol) {
    const double scale = std::min({1.0, std::max(lo, 0.0), std::max(1.0 - hi, 0.0)});
    return tol * std::max(scale, 1e-300);
}

}  // namespace

Bracket bisect(const std::function<double(double)>& f, double lo, double hi, double tol) {
    if (!(lo < hi)) {
        throw SolverError("bisect: empty bracket");
    }
    double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0.0) {
        return {lo, lo};
    }
    if (fhi == 0.0) {
        return {hi, hi};
    }
    if ((flo > 0.0) == (fhi > 0.0)) {
        std::ostringstream msg;
        msg << "bisect: no sign change on [" << lo << ", " << hi << "] (f = " << flo << ", " << fhi
            << ")";
        throw SolverError(msg.str());
    }
    while (hi - lo > width_limit(lo, hi, tol)) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) {
            break;
        }
        const double fmid = f(mid);
        if (fmid == 0.0) {
            return {mid, mid};
        }
        if ((fmid > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return {lo, hi};
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi, double tol) {
    const auto b = bisect(f, lo, hi, tol);
    return b.lo + 0.5 * (b.hi - b.lo);
}

double golden_section_min(const std::function<double(double)>& f, double lo, double hi, double tol) {
    static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace seqtest::roots
