#pragma once

#include "bdup/types.hpp"

namespace bdup {

/// Householder reflector H = I - 2 y y^T with unit essential vector y.
/// Entries of y before `offset` are zero, so H acts only on the tail.
struct HouseholderVector {
    Vector essential;  // full length, zero before offset, unit 2-norm
    Index offset = 0;
    double tau = 2.0;
};

struct HouseReflection {
    double alpha = 0.0;
    HouseholderVector y;
};

/// Reflector zeroing a(offset+1:end) into a(offset) = alpha.
/// alpha gets the sign opposite to a(offset); an all-zero tail yields
/// alpha = 0 and y = e_offset.
HouseReflection house(const Vector& a, Index offset);

/// (I - 2 y y^T) x computed in O(len) without forming H.
Vector apply_reflector(const HouseholderVector& y, const Vector& x);

}  // namespace bdup
