#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace loqc {

using cx = std::complex<double>;

// Default tolerances. Double-precision permanents of the <=16x16 matrices
// handled here stay well below these bounds.
inline constexpr double kUnitaryTol = 1e-10;   // max-norm of U*U^dag - I
inline constexpr double kProbTol = 1e-9;       // distribution sum deviation
inline constexpr double kAmpEpsilon = 1e-12;   // amplitude treated as zero
inline constexpr std::size_t kDefaultBasisCap = 5'000'000;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DimensionError : Error {
    using Error::Error;
};
struct ConservationError : Error {
    using Error::Error;
};
struct ResourceLimitError : Error {
    ResourceLimitError(const std::string& msg, std::uint64_t computed)
        : Error(msg), computed_size(computed) {}
    std::uint64_t computed_size;
};
struct InfeasiblePostselectionError : Error {
    using Error::Error;
};
struct UnsupportedDepthError : Error {
    UnsupportedDepthError(const std::string& msg, int layer) : Error(msg), layer(layer) {}
    int layer;
};
struct ParseError : Error {
    ParseError(const std::string& msg, int line) : Error(msg), line(line) {}
    int line;
};
struct ValidationError : Error {
    using Error::Error;
};

// Dense row-major complex matrix. Everything in this project is small
// (2x2 gates up to ~32x32 interferometers), so no sparse or blocked paths.
class CMat {
  public:
    CMat() = default;
    CMat(int rows, int cols) : rows_(rows), cols_(cols), a_(std::size_t(rows) * cols) {}

    static CMat identity(int n) {
        CMat m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    cx& at(int r, int c) { return a_[std::size_t(r) * cols_ + c]; }
    const cx& at(int r, int c) const { return a_[std::size_t(r) * cols_ + c]; }

    CMat mul(const CMat& rhs) const {
        if (cols_ != rhs.rows_) throw DimensionError("matrix product dimension mismatch");
        CMat out(rows_, rhs.cols_);
        for (int i = 0; i < rows_; ++i) {
            for (int k = 0; k < cols_; ++k) {
                cx v = at(i, k);
                if (v == cx{}) continue;
                for (int j = 0; j < rhs.cols_; ++j) out.at(i, j) += v * rhs.at(k, j);
            }
        }
        return out;
    }

    CMat adjoint() const {
        CMat out(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) out.at(j, i) = std::conj(at(i, j));
        return out;
    }

    double max_abs_diff(const CMat& rhs) const {
        if (rows_ != rhs.rows_ || cols_ != rhs.cols_) return 1e300;
        double m = 0;
        for (std::size_t i = 0; i < a_.size(); ++i) m = std::max(m, std::abs(a_[i] - rhs.a_[i]));
        return m;
    }

    bool is_unitary(double tol = kUnitaryTol) const {
        if (rows_ != cols_) return false;
        return mul(adjoint()).max_abs_diff(identity(rows_)) <= tol;
    }

    bool operator==(const CMat& rhs) const {
        return rows_ == rhs.rows_ && cols_ == rhs.cols_ && a_ == rhs.a_;
    }

  private:
    int rows_ = 0, cols_ = 0;
    std::vector<cx> a_;
};

// Photon occupation numbers, one entry per mode.
struct FockState {
    std::vector<int> occ;

    FockState() = default;
    explicit FockState(std::vector<int> o) : occ(std::move(o)) {}

    int modes() const { return int(occ.size()); }
    int total_photons() const {
        int t = 0;
        for (int v : occ) t += v;
        return t;
    }
    bool valid() const {
        for (int v : occ)
            if (v < 0) return false;
        return true;
    }

    bool operator==(const FockState& rhs) const { return occ == rhs.occ; }
    bool operator<(const FockState& rhs) const { return occ < rhs.occ; }

    std::string str() const {
        std::string s = "|";
        for (std::size_t i = 0; i < occ.size(); ++i) {
            if (i) s += ',';
            s += std::to_string(occ[i]);
        }
        s += ">";
        return s;
    }
};

// Required photon count per postselected mode.
struct PostselectionSpec {
    std::map<int, int> required;

    bool empty() const { return required.empty(); }
    bool operator==(const PostselectionSpec& rhs) const { return required == rhs.required; }
};

// Probabilities over Fock states, kept lexicographically sorted so that
// serialization, sampling and golden files are deterministic.
struct Distribution {
    std::vector<std::pair<FockState, double>> entries;
    double success_probability = 1.0;

    double total_mass() const {
        double s = 0;
        for (const auto& e : entries) s += e.second;
        return s;
    }
    double probability_of(const FockState& f) const {
        for (const auto& e : entries)
            if (e.first == f) return e.second;
        return 0.0;
    }
};

struct Violation {
    std::string context;  // e.g. "layer 2"
    std::string message;

    std::string str() const { return context.empty() ? message : context + ": " + message; }
};

std::string format_double(double v);   // 17 significant digits, round-trip exact
double parse_double(const std::string& tok, int line);

}  // namespace loqc
