#ifndef KEPCG_SIMPLEX_HPP
#define KEPCG_SIMPLEX_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "kepcg/errors.hpp"

namespace kepcg {

struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// Bounded revised primal simplex for the packing LP
///   max sum c_j x_j   s.t.  sum_{j : r in rows_j} x_j <= 1  (all rows),  x >= 0
/// with 0/1 structural columns and an explicit dense basis inverse.
/// Columns may be appended between solves; the basis warm-starts.
class PackingLp {
public:
    explicit PackingLp(int num_rows) : m_(num_rows) {
        basis_.resize(m_);
        for (int r = 0; r < m_; ++r) basis_[r] = slack(r);
        binv_.assign(m_, std::vector<double>(m_, 0.0));
        for (int r = 0; r < m_; ++r) binv_[r][r] = 1.0;
        xb_.assign(m_, 1.0);
        duals_.assign(m_, 0.0);
    }

    int add_column(std::vector<int> rows, double obj) {
        std::sort(rows.begin(), rows.end());
        cols_.push_back({std::move(rows), obj});
        in_basis_.push_back(false);
        return static_cast<int>(cols_.size()) - 1;
    }

    int num_rows() const { return m_; }
    int num_columns() const { return static_cast<int>(cols_.size()); }

    void solve() {
        const double feas_tol = 1e-9;
        const double opt_tol = 1e-7;
        int degenerate_streak = 0;
        bool bland = false;
        long iterations = 0;
        const long max_iterations = 20000 + 200L * (num_columns() + m_);

        while (true) {
            if (++iterations > max_iterations)
                throw SolverError("simplex iteration limit reached (" +
                                  std::to_string(max_iterations) + " iterations, " +
                                  std::to_string(num_columns()) + " columns)");
            if (iterations % 256 == 0) refactorize();

            compute_duals();
            int entering = bland ? price_bland(opt_tol) : price_dantzig(opt_tol);
            if (entering == kNone) {
                if (!bland) break;
                bland = false;  // confirm optimality with the full rule
                if (price_dantzig(opt_tol) == kNone) break;
                continue;
            }

            std::vector<double> dir = ftran(entering);
            int leave = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (int k = 0; k < m_; ++k) {
                if (dir[k] <= feas_tol) continue;
                double ratio = std::max(0.0, xb_[k]) / dir[k];
                if (ratio < best_ratio - 1e-12 ||
                    (ratio < best_ratio + 1e-12 &&
                     (leave < 0 || basis_[k] < basis_[leave]))) {
                    best_ratio = ratio;
                    leave = k;
                }
            }
            if (leave < 0)
                throw SolverError("unbounded direction in packing LP (empty column?)");

            if (best_ratio < 1e-10) {
                if (++degenerate_streak > 40) bland = true;
            } else {
                degenerate_streak = 0;
                bland = false;
            }

            pivot(entering, leave, dir, best_ratio);
        }

        compute_duals();
        for (double& y : duals_) y = std::max(0.0, y);
        solved_ = true;
    }

    double objective() const {
        double z = 0.0;
        for (int k = 0; k < m_; ++k)
            if (basis_[k] >= 0) z += cols_[basis_[k]].obj * xb_[k];
        return z;
    }

    /// Row duals, clamped nonnegative; valid after solve().
    const std::vector<double>& duals() const { return duals_; }

    std::vector<double> primal() const {
        std::vector<double> x(cols_.size(), 0.0);
        for (int k = 0; k < m_; ++k)
            if (basis_[k] >= 0) x[basis_[k]] = std::max(0.0, xb_[k]);
        return x;
    }

private:
    struct Column {
        std::vector<int> rows;
        double obj;
    };

    static constexpr int kNone = std::numeric_limits<int>::min();

    int slack(int row) const { return -1 - row; }
    bool is_slack(int var) const { return var < 0; }
    int slack_row(int var) const { return -1 - var; }

    double col_obj(int var) const { return is_slack(var) ? 0.0 : cols_[var].obj; }

    void compute_duals() {
        for (int r = 0; r < m_; ++r) {
            double y = 0.0;
            for (int k = 0; k < m_; ++k) {
                double c = col_obj(basis_[k]);
                if (c != 0.0) y += c * binv_[k][r];
            }
            duals_[r] = y;
        }
    }

    double reduced_cost(int var) const {
        if (is_slack(var)) return -duals_[slack_row(var)];
        double rc = cols_[var].obj;
        for (int r : cols_[var].rows) rc -= duals_[r];
        return rc;
    }

    int price_dantzig(double tol) const {
        int best = kNone;
        double best_rc = tol;
        for (int j = 0; j < num_columns(); ++j) {
            if (in_basis_[j]) continue;
            double rc = reduced_cost(j);
            if (rc > best_rc) {
                best_rc = rc;
                best = j;
            }
        }
        for (int r = 0; r < m_; ++r) {
            int var = slack(r);
            if (slack_in_basis(r)) continue;
            double rc = reduced_cost(var);
            if (rc > best_rc) {
                best_rc = rc;
                best = var;
            }
        }
        return best;
    }

    int price_bland(double tol) const {
        // Fixed variable order: structural columns by index, then slacks.
        for (int j = 0; j < num_columns(); ++j)
            if (!in_basis_[j] && reduced_cost(j) > tol) return j;
        for (int r = 0; r < m_; ++r)
            if (!slack_in_basis(r) && reduced_cost(slack(r)) > tol) return slack(r);
        return kNone;
    }

    bool slack_in_basis(int row) const {
        for (int k = 0; k < m_; ++k)
            if (basis_[k] == slack(row)) return true;
        return false;
    }

    std::vector<double> ftran(int var) const {
        std::vector<double> out(m_, 0.0);
        if (is_slack(var)) {
            int r = slack_row(var);
            for (int k = 0; k < m_; ++k) out[k] = binv_[k][r];
        } else {
            for (int r : cols_[var].rows)
                for (int k = 0; k < m_; ++k) out[k] += binv_[k][r];
        }
        return out;
    }

    void pivot(int entering, int leave, const std::vector<double>& dir, double ratio) {
        for (int k = 0; k < m_; ++k) xb_[k] -= ratio * dir[k];
        xb_[leave] = ratio;

        double piv = dir[leave];
        for (int r = 0; r < m_; ++r) binv_[leave][r] /= piv;
        for (int k = 0; k < m_; ++k) {
            if (k == leave || dir[k] == 0.0) continue;
            double f = dir[k];
            for (int r = 0; r < m_; ++r) binv_[k][r] -= f * binv_[leave][r];
        }

        int leaving_var = basis_[leave];
        if (!is_slack(leaving_var)) in_basis_[leaving_var] = false;
        basis_[leave] = entering;
        if (!is_slack(entering)) in_basis_[entering] = true;
    }

    /// Rebuilds the basis inverse and basic values from scratch.
    void refactorize() {
        std::vector<std::vector<double>> mat(m_, std::vector<double>(2 * m_, 0.0));
        for (int k = 0; k < m_; ++k) {
            int var = basis_[k];
            if (is_slack(var)) {
                mat[slack_row(var)][k] = 1.0;
            } else {
                for (int r : cols_[var].rows) mat[r][k] = 1.0;
            }
            mat[k][m_ + k] = 1.0;
        }
        for (int c = 0; c < m_; ++c) {
            int p = c;
            for (int r = c + 1; r < m_; ++r)
                if (std::abs(mat[r][c]) > std::abs(mat[p][c])) p = r;
            if (std::abs(mat[p][c]) < 1e-12)
                throw SolverError("singular basis during refactorization (pivot " +
                                  std::to_string(mat[p][c]) + " at column " +
                                  std::to_string(c) + ")");
            std::swap(mat[c], mat[p]);
            double inv = 1.0 / mat[c][c];
            for (int r2 = 0; r2 < 2 * m_; ++r2) mat[c][r2] *= inv;
            for (int r = 0; r < m_; ++r) {
                if (r == c || mat[r][c] == 0.0) continue;
                double f = mat[r][c];
                for (int r2 = c; r2 < 2 * m_; ++r2) mat[r][r2] -= f * mat[c][r2];
            }
        }
        // mat[.][m..2m) now holds inv(B) in (row=equation, col=basis position)
        // order: x_B = inv(B) b with inv(B)[k][r] = mat[k][m_+...]; transpose to
        // our layout.
        for (int k = 0; k < m_; ++k)
            for (int r = 0; r < m_; ++r) binv_[k][r] = mat[k][m_ + r];
        // b = ones
        for (int k = 0; k < m_; ++k) {
            double v = 0.0;
            for (int r = 0; r < m_; ++r) v += binv_[k][r];
            xb_[k] = v;
        }
    }

    int m_;
    std::vector<Column> cols_;
    std::vector<bool> in_basis_;
    std::vector<int> basis_;  // position -> variable (>=0 column, <0 slack)
    std::vector<std::vector<double>> binv_;
    std::vector<double> xb_;
    std::vector<double> duals_;
    bool solved_ = false;
};

}  // namespace kepcg

#endif
