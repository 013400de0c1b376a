#include "bdup/householder.hpp"

#include <cmath>

namespace bdup {

HouseReflection house(const Vector& a, Index offset) {
    const Index n = a.size();
    if (offset < 0 || offset >= n)
        throw std::invalid_argument("house: empty slice at offset " + std::to_string(offset));

    const Index len = n - offset;
    const double norm = a.tail(len).norm();

    HouseReflection r;
    r.y.offset = offset;
    r.y.essential = Vector::Zero(n);
    if (norm == 0.0) {
        // degenerate: nothing to eliminate, pick a harmless unit reflector
        r.alpha = 0.0;
        r.y.essential(offset) = 1.0;
        return r;
    }

    const double a0 = a(offset);
    r.alpha = a0 > 0.0 ? -norm : norm;
    // v = a(tail) - alpha * e_offset, normalized; subtraction never cancels
    r.y.essential.tail(len) = a.tail(len);
    r.y.essential(offset) -= r.alpha;
    r.y.essential.tail(len) /= r.y.essential.tail(len).norm();
    return r;
}

Vector apply_reflector(const HouseholderVector& y, const Vector& x) {
    if (x.size() != y.essential.size())
        throw std::invalid_argument("apply_reflector: dimension mismatch");
    const Index len = x.size() - y.offset;
    const double dot = y.essential.tail(len).dot(x.tail(len));
    Vector out = x;
    out.tail(len) -= (y.tau * dot) * y.essential.tail(len);
    return out;
}

}  // namespace bdup
