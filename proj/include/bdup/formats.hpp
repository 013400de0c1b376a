#pragma once

#include "bdup/bgu.hpp"
#include "bdup/bhu.hpp"
#include "bdup/tracking.hpp"
#include "bdup/types.hpp"

#include <string>

namespace bdup {

// Binary container formats, little-endian 64-bit floats throughout.
//   band      "BDBD" | u64 m, n         | alpha[t], beta[t-1]
//   factor    "BDMT" | u64 rows, cols   | column-major data
//   bhu state "BDHU" | u64 m, n, kl, kr | alpha[t], beta[t-1], bhat[m],
//             chat[n], packed Y/T (m x kl, column j holds T(0:j-1, j)
//             above y_j), packed W/R (n x kr, R above one spare slot and
//             w_{j+1}), Y^T bhat [kl], chat^T W [kr]
//   tracker   "BDTK" | u64 m, n, r, update_count | Q, P column-major,
//             alpha[r], beta[r-1], drift_Q, drift_P

void write_band(const std::string& path, const BidiagonalMatrix& B);
BidiagonalMatrix read_band(const std::string& path);

void write_factor(const std::string& path, const Matrix& M);
Matrix read_factor(const std::string& path);

void write_bhu_state(const std::string& path, const HouseholderCompactState& st);
HouseholderCompactState read_bhu_state(const std::string& path, bool cache_band_product = true);

void write_tracker_snapshot(const std::string& path, const TrackedFactorization& t);
TrackedFactorization read_tracker_snapshot(const std::string& path,
                                           ReorthPolicy policy = ReorthPolicy::never());

/// Rotation log dump: CSV rows `side,i,j,c,s` with 1-based indices.
void write_rotation_log(const std::string& path, const std::vector<GivensRotation>& left,
                        const std::vector<GivensRotation>& right);
std::pair<std::vector<GivensRotation>, std::vector<GivensRotation>> read_rotation_log(
    const std::string& path);

/// Stream file: header `m n count`, then `i j theta [timestamp]` per
/// line (1-based indices). Events are ordered by timestamp when present,
/// ties and missing stamps resolved by line order.
struct StreamEvent {
    Index i = 0, j = 0;
    double theta = 0.0;
    long long timestamp = 0;
    bool has_timestamp = false;
};

struct StreamFile {
    Index m = 0, n = 0;
    std::vector<StreamEvent> events;
};

StreamFile read_stream_file(const std::string& path);
void write_stream_file(const std::string& path, const StreamFile& sf);

}  // namespace bdup
