#include "bdup/formats.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>

namespace bdup {
namespace {

void put_magic(std::ofstream& out, const char tag[5]) { out.write(tag, 4); }

void check_magic(std::ifstream& in, const char tag[5], const std::string& path) {
    char buf[4];
    in.read(buf, 4);
    if (!in || std::memcmp(buf, tag, 4) != 0)
        throw std::runtime_error(path + ": bad or truncated header");
}

void put_u64(std::ofstream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<char*>(b), 8);
}

std::uint64_t get_u64(std::ifstream& in, const std::string& path) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw std::runtime_error(path + ": truncated file");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

void put_f64(std::ofstream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(out, bits);
}

double get_f64(std::ifstream& in, const std::string& path) {
    const std::uint64_t bits = get_u64(in, path);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

void put_vec(std::ofstream& out, const Vector& v) {
    for (Index i = 0; i < v.size(); ++i) put_f64(out, v(i));
}

Vector get_vec(std::ifstream& in, Index n, const std::string& path) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = get_f64(in, path);
    return v;
}

void put_mat(std::ofstream& out, const Matrix& M) {  // column-major
    for (Index j = 0; j < M.cols(); ++j)
        for (Index i = 0; i < M.rows(); ++i) put_f64(out, M(i, j));
}

Matrix get_mat(std::ifstream& in, Index rows, Index cols, const std::string& path) {
    Matrix M(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) M(i, j) = get_f64(in, path);
    return M;
}

}  // namespace

void write_band(const std::string& path, const BidiagonalMatrix& B) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    put_magic(out, "BDBD");
    put_u64(out, static_cast<std::uint64_t>(B.rows));
    put_u64(out, static_cast<std::uint64_t>(B.cols));
    put_vec(out, B.alpha);
    put_vec(out, B.beta);
}

BidiagonalMatrix read_band(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    check_magic(in, "BDBD", path);
    const Index m = static_cast<Index>(get_u64(in, path));
    const Index n = static_cast<Index>(get_u64(in, path));
    BidiagonalMatrix B(m, n);
    B.alpha = get_vec(in, B.alpha.size(), path);
    B.beta = get_vec(in, B.beta.size(), path);
    return B;
}

void write_factor(const std::string& path, const Matrix& M) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    put_magic(out, "BDMT");
    put_u64(out, static_cast<std::uint64_t>(M.rows()));
    put_u64(out, static_cast<std::uint64_t>(M.cols()));
    put_mat(out, M);
}

Matrix read_factor(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    check_magic(in, "BDMT", path);
    const Index r = static_cast<Index>(get_u64(in, path));
    const Index c = static_cast<Index>(get_u64(in, path));
    return get_mat(in, r, c, path);
}

void write_bhu_state(const std::string& path, const HouseholderCompactState& st) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    put_magic(out, "BDHU");
    put_u64(out, static_cast<std::uint64_t>(st.rows()));
    put_u64(out, static_cast<std::uint64_t>(st.cols()));
    put_u64(out, static_cast<std::uint64_t>(st.k_left()));
    put_u64(out, static_cast<std::uint64_t>(st.k_right()));
    put_vec(out, st.band().alpha);
    put_vec(out, st.band().beta);
    put_vec(out, st.bhat());
    put_vec(out, st.chat());
    for (Index j = 0; j < st.k_left(); ++j) put_vec(out, st.packed_left_column(j));
    for (Index j = 0; j < st.k_right(); ++j) put_vec(out, st.packed_right_column(j));
    put_vec(out, st.cached_Yt_bhat());
    put_vec(out, st.cached_chatT_W());
}

HouseholderCompactState read_bhu_state(const std::string& path, bool cache_band_product) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    check_magic(in, "BDHU", path);
    const Index m = static_cast<Index>(get_u64(in, path));
    const Index n = static_cast<Index>(get_u64(in, path));
    const Index kl = static_cast<Index>(get_u64(in, path));
    const Index kr = static_cast<Index>(get_u64(in, path));
    BidiagonalMatrix B(m, n);
    B.alpha = get_vec(in, B.alpha.size(), path);
    B.beta = get_vec(in, B.beta.size(), path);
    Vector bhat = get_vec(in, m, path);
    Vector chat = get_vec(in, n, path);
    Matrix packedY = get_mat(in, m, kl, path);
    Matrix packedW = get_mat(in, n, kr, path);
    Vector yTb = get_vec(in, kl, path);
    Vector cTW = get_vec(in, kr, path);
    HouseholderCompactState st(std::move(B), std::move(bhat), std::move(chat), cache_band_product);
    st.restore_packed(kl, kr, packedY, packedW, yTb, cTW);
    return st;
}

void write_tracker_snapshot(const std::string& path, const TrackedFactorization& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    put_magic(out, "BDTK");
    put_u64(out, static_cast<std::uint64_t>(t.rows()));
    put_u64(out, static_cast<std::uint64_t>(t.cols()));
    put_u64(out, static_cast<std::uint64_t>(t.rank()));
    put_u64(out, t.update_count());
    put_mat(out, t.Q());
    put_mat(out, t.P());
    put_vec(out, t.band().alpha);
    put_vec(out, t.band().beta);
    TrackedFactorization& mut = const_cast<TrackedFactorization&>(t);
    auto [dq, dp] = mut.drift_check();
    put_f64(out, dq);
    put_f64(out, dp);
}

TrackedFactorization read_tracker_snapshot(const std::string& path, ReorthPolicy policy) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    check_magic(in, "BDTK", path);
    const Index m = static_cast<Index>(get_u64(in, path));
    const Index n = static_cast<Index>(get_u64(in, path));
    const Index r = static_cast<Index>(get_u64(in, path));
    const std::uint64_t count = get_u64(in, path);
    Matrix Q = get_mat(in, m, r, path);
    Matrix P = get_mat(in, n, r, path);
    BidiagonalMatrix B(r, r);
    B.alpha = get_vec(in, r, path);
    B.beta = get_vec(in, std::max<Index>(r - 1, 0), path);
    const double dq = get_f64(in, path);
    const double dp = get_f64(in, path);
    return TrackedFactorization::from_parts(std::move(Q), std::move(P), std::move(B), count, dq,
                                            dp, policy);
}

void write_rotation_log(const std::string& path, const std::vector<GivensRotation>& left,
                        const std::vector<GivensRotation>& right) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "side,i,j,c,s\n";
    out.precision(17);
    auto dump = [&](const std::vector<GivensRotation>& rots, const char* side) {
        for (const auto& g : rots)
            out << side << "," << (g.i + 1) << "," << (g.j + 1) << "," << g.c << "," << g.s
                << "\n";
    };
    dump(left, "left");
    dump(right, "right");
}

std::pair<std::vector<GivensRotation>, std::vector<GivensRotation>> read_rotation_log(
    const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<GivensRotation> left, right;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string side, cell;
        GivensRotation g;
        try {
            std::getline(ss, side, ',');
            std::getline(ss, cell, ',');
            g.i = std::stol(cell) - 1;
            std::getline(ss, cell, ',');
            g.j = std::stol(cell) - 1;
            std::getline(ss, cell, ',');
            g.c = std::stod(cell);
            std::getline(ss, cell, ',');
            g.s = std::stod(cell);
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad rotation row");
        }
        g.side = side == "left" ? GivensRotation::Side::Left : GivensRotation::Side::Right;
        (side == "left" ? left : right).push_back(g);
    }
    return {std::move(left), std::move(right)};
}

StreamFile read_stream_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    StreamFile sf;
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty stream file");
    ++lineno;
    {
        std::istringstream head(line);
        long m = 0, n = 0, count = 0;
        if (!(head >> m >> n >> count) || m < 1 || n < 1 || count < 0)
            throw std::runtime_error(path + ":1: bad stream header");
        sf.m = m;
        sf.n = n;
        sf.events.reserve(static_cast<std::size_t>(count));
    }
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream row(line);
        StreamEvent ev;
        long i = 0, j = 0;
        if (!(row >> i >> j >> ev.theta))
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad event line");
        if (i < 1 || i > sf.m || j < 1 || j > sf.n)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": index out of bounds");
        ev.i = i - 1;
        ev.j = j - 1;
        long long ts;
        if (row >> ts) {
            ev.timestamp = ts;
            ev.has_timestamp = true;
        }
        sf.events.push_back(ev);
    }
    // timestamp order with file order breaking ties (stable by construction)
    std::stable_sort(sf.events.begin(), sf.events.end(), [](const StreamEvent& a, const StreamEvent& b) {
        if (a.has_timestamp && b.has_timestamp) return a.timestamp < b.timestamp;
        return false;
    });
    return sf;
}

void write_stream_file(const std::string& path, const StreamFile& sf) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << sf.m << " " << sf.n << " " << sf.events.size() << "\n";
    out.precision(17);
    for (const auto& ev : sf.events) {
        out << (ev.i + 1) << " " << (ev.j + 1) << " " << ev.theta;
        if (ev.has_timestamp) out << " " << ev.timestamp;
        out << "\n";
    }
}

}  // namespace bdup
