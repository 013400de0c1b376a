#include "bdup/mmio.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace bdup {
namespace {

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

}  // namespace

Matrix read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::size_t lineno = 0;

    if (!std::getline(in, line)) fail(path, 1, "empty file");
    ++lineno;
    std::istringstream head(line);
    std::string banner, object, format, field, symmetry;
    head >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || lower(object) != "matrix")
        fail(path, lineno, "not a MatrixMarket matrix file");
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);
    if (field != "real" && field != "integer" && field != "pattern")
        fail(path, lineno, "unsupported field type '" + field + "'");
    if (symmetry != "general" && symmetry != "symmetric")
        fail(path, lineno, "unsupported symmetry '" + symmetry + "'");

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line[0] != '%') break;
    }
    std::istringstream sz(line);
    if (format == "coordinate") {
        long m = 0, n = 0, nnz = 0;
        if (!(sz >> m >> n >> nnz) || m < 1 || n < 1 || nnz < 0)
            fail(path, lineno, "bad size line");
        Matrix A = Matrix::Zero(m, n);
        for (long k = 0; k < nnz; ++k) {
            if (!std::getline(in, line)) fail(path, lineno + 1, "unexpected end of file");
            ++lineno;
            std::istringstream row(line);
            long i = 0, j = 0;
            double v = 1.0;
            if (!(row >> i >> j)) fail(path, lineno, "bad coordinate entry");
            if (field != "pattern" && !(row >> v)) fail(path, lineno, "missing value");
            if (i < 1 || i > m || j < 1 || j > n) fail(path, lineno, "index out of range");
            A(i - 1, j - 1) = v;
            if (symmetry == "symmetric" && i != j) A(j - 1, i - 1) = v;
        }
        return A;
    }
    if (format == "array") {
        long m = 0, n = 0;
        if (!(sz >> m >> n) || m < 1 || n < 1) fail(path, lineno, "bad size line");
        Matrix A(m, n);
        for (long j = 0; j < n; ++j) {
            const long i0 = symmetry == "symmetric" ? j : 0;
            for (long i = i0; i < m; ++i) {
                if (!std::getline(in, line)) fail(path, lineno + 1, "unexpected end of file");
                ++lineno;
                std::istringstream row(line);
                double v;
                if (!(row >> v)) fail(path, lineno, "bad array value");
                A(i, j) = v;
                if (symmetry == "symmetric") A(j, i) = v;
            }
        }
        return A;
    }
    fail(path, 1, "unsupported format '" + format + "'");
}

void write_matrix_market(const std::string& path, const Matrix& A, double drop_tol) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    long nnz = 0;
    for (Index j = 0; j < A.cols(); ++j)
        for (Index i = 0; i < A.rows(); ++i)
            if (std::abs(A(i, j)) > drop_tol) ++nnz;
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << A.rows() << " " << A.cols() << " " << nnz << "\n";
    out.precision(17);
    for (Index j = 0; j < A.cols(); ++j)
        for (Index i = 0; i < A.rows(); ++i)
            if (std::abs(A(i, j)) > drop_tol)
                out << (i + 1) << " " << (j + 1) << " " << A(i, j) << "\n";
}

Matrix read_dense_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                fail(path, lineno, "bad CSV value '" + cell + "'");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            fail(path, lineno, "ragged CSV row");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error(path + ": empty CSV matrix");
    Matrix A(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < A.rows(); ++i)
        for (Index j = 0; j < A.cols(); ++j)
            A(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return A;
}

void write_dense_csv(const std::string& path, const Matrix& A) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(17);
    for (Index i = 0; i < A.rows(); ++i) {
        for (Index j = 0; j < A.cols(); ++j) {
            if (j) out << ",";
            out << A(i, j);
        }
        out << "\n";
    }
}

Matrix read_matrix_auto(const std::string& path) {
    const auto dot = path.rfind('.');
    const std::string ext = dot == std::string::npos ? "" : lower(path.substr(dot + 1));
    if (ext == "mtx" || ext == "mm") return read_matrix_market(path);
    if (ext == "csv") return read_dense_csv(path);
    throw std::runtime_error(path + ": unknown matrix format (use .mtx or .csv)");
}

Vector read_vector_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<double> vals;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            vals.push_back(std::stod(line));
        } catch (const std::exception&) {
            fail(path, lineno, "bad vector value '" + line + "'");
        }
    }
    Vector v(static_cast<Index>(vals.size()));
    for (Index i = 0; i < v.size(); ++i) v(i) = vals[static_cast<std::size_t>(i)];
    return v;
}

void write_vector_file(const std::string& path, const Vector& v) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(17);
    for (Index i = 0; i < v.size(); ++i) out << v(i) << "\n";
}

}  // namespace bdup
