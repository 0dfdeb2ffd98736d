#include "windcast/lp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace windcast::lp {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kEnterTol = 1e-9;
constexpr double kFeasTol = 1e-7;
constexpr double kDegenStep = 1e-12;

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

bool finite(double v) { return std::isfinite(v); }

// User variable -> internal nonnegative column(s).
struct ColMap {
    bool split = false;
    int col = -1;
    int col_neg = -1;   // only for split (free) variables
    double offset = 0;  // x_user = offset + sign * x_internal
    double sign = 1;
};

// Bounded-variable primal simplex on a dense tableau.
//
// Internally every column is kept in a representation where its current
// nonbasic value is 0. A nonbasic variable sitting at a finite upper bound u
// has its column, cost, and reduced cost negated ("flipped"), i.e. the
// tableau works with u - x instead of x. This keeps the pivot mechanics of
// the textbook simplex while supporting upper bounds without extra rows.
struct Tableau {
    RowMat t;                // m x n_total
    Vec rhs;                 // basic values in representation space
    Vec ub;                  // internal upper bounds (inf allowed)
    Vec c_int;               // phase-2 internal costs, unflipped orientation
    Vec c_cur;               // current-phase costs in representation space
    Vec d;                   // reduced costs
    double minus_z = 0;      // -(representation-space objective)
    double cost_const = 0;   // constant part of the phase-2 objective
    std::vector<int> basis;  // per row: internal column index
    std::vector<char> flipped;
    std::vector<char> forbidden;  // artificial/probe columns never enter
    int m = 0;
    int n_total = 0;

    double z() const { return -minus_z; }

    void pivot(int r, int jcol) {
        const double p = t(r, jcol);
        t.row(r) /= p;
        rhs(r) /= p;
        for (int i = 0; i < m; ++i) {
            if (i == r) continue;
            const double f = t(i, jcol);
            if (f != 0.0) {
                t.row(i) -= f * t.row(r);
                rhs(i) -= f * rhs(r);
            }
        }
        const double fc = d(jcol);
        if (fc != 0.0) {
            d -= fc * t.row(r).transpose();
            minus_z -= fc * rhs(r);
        }
        // keep the unit column exact
        for (int i = 0; i < m; ++i) t(i, jcol) = (i == r) ? 1.0 : 0.0;
        d(jcol) = 0.0;
        basis[static_cast<size_t>(r)] = jcol;
    }

    // Moves nonbasic column j to its (finite) upper bound and re-represents
    // it so that its nonbasic value is 0 again.
    void flip_to_bound(int j) {
        const double u = ub(j);
        rhs -= u * t.col(j);
        minus_z -= d(j) * u;
        // re-representation: z_rep loses c_cur(j) * u
        minus_z += c_cur(j) * u;
        cost_const += c_cur(j) * u;
        t.col(j) = -t.col(j);
        c_cur(j) = -c_cur(j);
        d(j) = -d(j);
        flipped[static_cast<size_t>(j)] ^= 1;
    }

    // Re-representation of a column that just left the basis at its upper
    // bound (the pivot has already been applied).
    void rerepresent_at_upper(int j) {
        const double u = ub(j);
        rhs -= u * t.col(j);
        minus_z -= d(j) * u;
        minus_z += c_cur(j) * u;
        cost_const += c_cur(j) * u;
        t.col(j) = -t.col(j);
        c_cur(j) = -c_cur(j);
        d(j) = -d(j);
        flipped[static_cast<size_t>(j)] ^= 1;
    }

    void rebuild_costs(const Vec& raw_cost, double base_const) {
        c_cur = raw_cost;
        for (int j = 0; j < n_total; ++j) {
            if (flipped[static_cast<size_t>(j)]) c_cur(j) = -raw_cost(j);
        }
        d = c_cur;
        minus_z = 0;
        for (int i = 0; i < m; ++i) {
            const int k = basis[static_cast<size_t>(i)];
            const double ck = c_cur(k);
            if (ck != 0.0) {
                d -= ck * t.row(i).transpose();
                minus_z -= ck * rhs(i);
            }
        }
        for (int i = 0; i < m; ++i) d(basis[static_cast<size_t>(i)]) = 0.0;
        cost_const = base_const;
        for (int j = 0; j < n_total; ++j) {
            if (flipped[static_cast<size_t>(j)] && finite(ub(j))) {
                cost_const += raw_cost(j) * ub(j);
            }
        }
    }
};

struct Standardized {
    std::vector<ColMap> cols;
    RowMat a;  // m x n_struct (structural + slack columns)
    Vec b;
    Vec c;      // internal costs over structural+slack columns
    Vec ub;
    std::vector<double> row_sign;
    std::vector<int> slack_col;      // -1 if none
    std::vector<double> slack_coef;  // coefficient after row normalization
    double shift_const = 0;
    double sense_factor = 1;  // user objective = sense_factor * internal min objective
    int n_struct_user = 0;    // internal columns owned by user variables
};

Standardized standardize(const LinearProgram& lp) {
    const int m = lp.rows();
    const int n = lp.cols();
    Standardized s;
    s.sense_factor = (lp.sense == Sense::Maximize) ? -1.0 : 1.0;

    // Internal objective is minimized.
    Vec c_user = lp.c;
    if (lp.sense == Sense::Maximize) c_user = -c_user;

    s.cols.resize(static_cast<size_t>(n));
    int nc = 0;
    for (int j = 0; j < n; ++j) {
        ColMap& cm = s.cols[static_cast<size_t>(j)];
        const double lo = lp.lo(j), hi = lp.hi(j);
        if (finite(lo)) {
            cm.col = nc++;
            cm.offset = lo;
            cm.sign = 1;
        } else if (finite(hi)) {
            cm.col = nc++;
            cm.offset = hi;
            cm.sign = -1;
        } else {
            cm.split = true;
            cm.col = nc++;
            cm.col_neg = nc++;
        }
    }
    const int n_user_cols = nc;
    s.n_struct_user = n_user_cols;

    int n_slack = 0;
    for (const Relation r : lp.rel) {
        if (r != Relation::Equal) ++n_slack;
    }
    const int n_struct = n_user_cols + n_slack;

    s.a = RowMat::Zero(m, n_struct);
    s.b = Vec::Zero(m);
    s.c = Vec::Zero(n_struct);
    s.ub = Vec::Constant(n_struct, infinity());
    s.row_sign.assign(static_cast<size_t>(m), 1.0);
    s.slack_col.assign(static_cast<size_t>(m), -1);
    s.slack_coef.assign(static_cast<size_t>(m), 0.0);

    for (int j = 0; j < n; ++j) {
        const ColMap& cm = s.cols[static_cast<size_t>(j)];
        if (cm.split) {
            s.c(cm.col) = c_user(j);
            s.c(cm.col_neg) = -c_user(j);
        } else {
            s.c(cm.col) = cm.sign * c_user(j);
            s.shift_const += c_user(j) * cm.offset;
            const double lo = lp.lo(j), hi = lp.hi(j);
            if (finite(lo) && finite(hi)) s.ub(cm.col) = hi - lo;
        }
    }

    int slack = n_user_cols;
    for (int i = 0; i < m; ++i) {
        double rb = lp.b(i);
        for (int j = 0; j < n; ++j) {
            const double aij = lp.a(i, j);
            if (aij == 0.0) continue;
            const ColMap& cm = s.cols[static_cast<size_t>(j)];
            if (cm.split) {
                s.a(i, cm.col) += aij;
                s.a(i, cm.col_neg) -= aij;
            } else {
                s.a(i, cm.col) += aij * cm.sign;
                rb -= aij * cm.offset;
            }
        }
        double scoef = 0;
        if (lp.rel[static_cast<size_t>(i)] == Relation::LessEq) scoef = 1;
        if (lp.rel[static_cast<size_t>(i)] == Relation::GreaterEq) scoef = -1;
        if (scoef != 0) {
            s.a(i, slack) = scoef;
            s.slack_col[static_cast<size_t>(i)] = slack;
            ++slack;
        }
        if (rb < 0) {
            s.a.row(i) = -s.a.row(i);
            rb = -rb;
            s.row_sign[static_cast<size_t>(i)] = -1.0;
            scoef = -scoef;
        }
        s.b(i) = rb;
        s.slack_coef[static_cast<size_t>(i)] = scoef;
    }
    return s;
}

enum class LoopResult { OptimalReached, UnboundedRay };

struct SimplexDriver {
    Tableau& tb;
    Pricing pricing;
    long max_iters;
    long* iters;
    int degen_streak = 0;
    bool bland_now = false;

    int price() const {
        const bool bland = bland_now || pricing == Pricing::Bland;
        int best = -1;
        double best_d = -kEnterTol;
        for (int j = 0; j < tb.n_total; ++j) {
            if (tb.forbidden[static_cast<size_t>(j)]) continue;
            const double dj = tb.d(j);
            if (dj < -kEnterTol) {
                if (bland) return j;
                if (dj < best_d) {
                    best_d = dj;
                    best = j;
                }
            }
        }
        return best;
    }

    LoopResult run() {
        for (;;) {
            if (++(*iters) > max_iters) {
                throw IterationLimit("simplex iteration limit exceeded (" +
                                     std::to_string(max_iters) + " pivots)");
            }
            const int j = price();
            if (j < 0) return LoopResult::OptimalReached;

            const bool bland = bland_now || pricing == Pricing::Bland;
            double t_min = tb.ub(j);
            int r_best = -1;
            bool leaves_at_upper = false;
            double best_piv = 0;
            for (int i = 0; i < tb.m; ++i) {
                const double y = tb.t(i, j);
                double t = infinity();
                bool at_upper = false;
                if (y > kPivotTol) {
                    t = std::max(tb.rhs(i), 0.0) / y;
                } else if (y < -kPivotTol) {
                    const double u = tb.ub(tb.basis[static_cast<size_t>(i)]);
                    if (!finite(u)) continue;
                    t = (u - tb.rhs(i)) / (-y);
                    if (t < 0) t = 0;
                    at_upper = true;
                } else {
                    continue;
                }
                bool better = false;
                if (t < t_min - kDegenStep) {
                    better = true;
                } else if (t <= t_min + kDegenStep && r_best >= 0) {
                    if (bland) {
                        better = tb.basis[static_cast<size_t>(i)] <
                                 tb.basis[static_cast<size_t>(r_best)];
                    } else {
                        better = std::abs(y) > best_piv;
                    }
                }
                if (r_best < 0 && t <= t_min + kDegenStep) better = true;
                if (better) {
                    t_min = std::min(t, t_min);
                    r_best = i;
                    leaves_at_upper = at_upper;
                    best_piv = std::abs(y);
                }
            }

            if (r_best < 0) {
                if (!finite(tb.ub(j))) return LoopResult::UnboundedRay;
                tb.flip_to_bound(j);
                continue;
            }

            const double step = t_min;
            if (step < kDegenStep) {
                if (++degen_streak > 50) bland_now = true;
            } else {
                degen_streak = 0;
                if (pricing == Pricing::Auto) bland_now = false;
            }

            const int leaving = tb.basis[static_cast<size_t>(r_best)];
            tb.pivot(r_best, j);
            if (leaves_at_upper) tb.rerepresent_at_upper(leaving);
        }
    }
};

}  // namespace

void LinearProgram::validate() const {
    const int m = rows(), n = cols();
    if (c.size() != n || lo.size() != n || hi.size() != n) {
        throw InvalidProgram("objective/bounds length does not match column count");
    }
    if (b.size() != m || static_cast<int>(rel.size()) != m) {
        throw InvalidProgram("rhs/relation length does not match row count");
    }
    for (int j = 0; j < n; ++j) {
        if (std::isnan(lo(j)) || std::isnan(hi(j)) || lo(j) > hi(j)) {
            throw InvalidProgram("invalid bounds for variable " + std::to_string(j));
        }
        if (!finite(c(j))) throw InvalidProgram("non-finite objective coefficient");
    }
    for (int i = 0; i < m; ++i) {
        if (!finite(b(i))) throw InvalidProgram("non-finite rhs");
        for (int j = 0; j < n; ++j) {
            if (!finite(a(i, j))) throw InvalidProgram("non-finite matrix entry");
        }
    }
}

LpSolution solve(const LinearProgram& lp, const SolveOptions& options) {
    lp.validate();
    const int m = lp.rows();
    const int n = lp.cols();
    Standardized s = standardize(lp);
    const int n_struct = static_cast<int>(s.a.cols());

    // probe columns provide B^-1 e_i for dual extraction / phase 1
    std::vector<int> art_col(static_cast<size_t>(m), -1);

    Tableau tb;
    tb.m = m;

    long iters = 0;
    const long max_iters =
        options.max_iterations > 0 ? options.max_iterations : 100L * (m + n);

    bool hint_ok = false;
    if (!options.basis_hint.empty()) {
        if (static_cast<int>(options.basis_hint.size()) != m) {
            throw InvalidProgram("basis hint size must equal row count");
        }
        // Map hint entries (user variables or row slacks) to internal columns.
        std::vector<int> cols_int;
        cols_int.reserve(static_cast<size_t>(m));
        bool mappable = true;
        for (const int h : options.basis_hint) {
            if (h >= 0) {
                if (h >= n || s.cols[static_cast<size_t>(h)].split) {
                    mappable = false;
                    break;
                }
                cols_int.push_back(s.cols[static_cast<size_t>(h)].col);
            } else {
                const int row = -1 - h;
                if (row < 0 || row >= m || s.slack_col[static_cast<size_t>(row)] < 0) {
                    mappable = false;
                    break;
                }
                cols_int.push_back(s.slack_col[static_cast<size_t>(row)]);
            }
        }
        if (mappable) {
            Eigen::MatrixXd bmat(m, m);
            for (int k = 0; k < m; ++k) bmat.col(k) = s.a.col(cols_int[static_cast<size_t>(k)]);
            Eigen::PartialPivLU<Eigen::MatrixXd> lu(bmat);
            const double diag_min = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
            const double diag_max = lu.matrixLU().diagonal().cwiseAbs().maxCoeff();
            if (diag_min > 1e-12 * std::max(1.0, diag_max)) {
                // Need probe columns for equality rows so duals stay available.
                int n_probe = 0;
                for (int i = 0; i < m; ++i) {
                    if (s.slack_col[static_cast<size_t>(i)] < 0) ++n_probe;
                }
                Eigen::MatrixXd all(m, n_struct + n_probe + 1);
                all.leftCols(n_struct) = s.a;
                int pc = n_struct;
                for (int i = 0; i < m; ++i) {
                    if (s.slack_col[static_cast<size_t>(i)] < 0) {
                        all.col(pc) = Eigen::VectorXd::Unit(m, i);
                        art_col[static_cast<size_t>(i)] = pc;
                        ++pc;
                    }
                }
                all.col(pc) = s.b;
                Eigen::MatrixXd solved = lu.solve(all);
                Vec rhs0 = solved.col(pc);
                bool feasible = true;
                for (int k = 0; k < m; ++k) {
                    const double v = rhs0(k);
                    const double u = s.ub(cols_int[static_cast<size_t>(k)]);
                    if (v < -kFeasTol || (finite(u) && v > u + kFeasTol)) {
                        feasible = false;
                        break;
                    }
                }
                if (feasible) {
                    tb.n_total = n_struct + n_probe;
                    tb.t = solved.leftCols(tb.n_total);
                    tb.rhs = rhs0.cwiseMax(0.0);
                    tb.ub = Vec::Constant(tb.n_total, infinity());
                    tb.ub.head(n_struct) = s.ub;
                    tb.c_int = Vec::Zero(tb.n_total);
                    tb.c_int.head(n_struct) = s.c;
                    tb.basis = cols_int;
                    tb.flipped.assign(static_cast<size_t>(tb.n_total), 0);
                    tb.forbidden.assign(static_cast<size_t>(tb.n_total), 0);
                    for (int j = n_struct; j < tb.n_total; ++j) {
                        tb.forbidden[static_cast<size_t>(j)] = 1;
                        tb.ub(j) = 0.0;
                    }
                    hint_ok = true;
                }
            }
        }
    }

    if (!hint_ok) {
        // Phase 1 with artificial columns where no slack can start basic.
        int n_art = 0;
        for (int i = 0; i < m; ++i) {
            if (s.slack_coef[static_cast<size_t>(i)] != 1.0) ++n_art;
        }
        tb.n_total = n_struct + n_art;
        tb.t = RowMat::Zero(m, tb.n_total);
        tb.t.leftCols(n_struct) = s.a;
        tb.rhs = s.b;
        tb.ub = Vec::Constant(tb.n_total, infinity());
        tb.ub.head(n_struct) = s.ub;
        tb.c_int = Vec::Zero(tb.n_total);
        tb.c_int.head(n_struct) = s.c;
        tb.flipped.assign(static_cast<size_t>(tb.n_total), 0);
        tb.forbidden.assign(static_cast<size_t>(tb.n_total), 0);
        tb.basis.assign(static_cast<size_t>(m), -1);

        Vec c1 = Vec::Zero(tb.n_total);
        int ac = n_struct;
        for (int i = 0; i < m; ++i) {
            if (s.slack_coef[static_cast<size_t>(i)] == 1.0) {
                tb.basis[static_cast<size_t>(i)] = s.slack_col[static_cast<size_t>(i)];
            } else {
                tb.t(i, ac) = 1.0;
                tb.basis[static_cast<size_t>(i)] = ac;
                tb.forbidden[static_cast<size_t>(ac)] = 1;
                art_col[static_cast<size_t>(i)] = ac;
                c1(ac) = 1.0;
                ++ac;
            }
        }

        tb.rebuild_costs(c1, 0.0);
        SimplexDriver phase1{tb, options.pricing, max_iters, &iters};
        const LoopResult r1 = phase1.run();
        if (r1 == LoopResult::UnboundedRay || tb.z() > kFeasTol) {
            if (tb.z() > kFeasTol) {
                LpSolution sol;
                sol.status = Status::Infeasible;
                sol.x = Vec::Zero(n);
                sol.objective = 0;
                sol.iterations = iters;
                return sol;
            }
            throw std::runtime_error("phase-1 internal error");
        }
        // Drive artificials out of the basis where possible.
        for (int i = 0; i < m; ++i) {
            const int k = tb.basis[static_cast<size_t>(i)];
            if (k < n_struct) continue;
            int best_j = -1;
            double best = kPivotTol;
            for (int j = 0; j < n_struct; ++j) {
                const double v = std::abs(tb.t(i, j));
                if (v > best) {
                    best = v;
                    best_j = j;
                }
            }
            if (best_j >= 0) tb.pivot(i, best_j);
            // else: redundant row, artificial stays basic at zero
        }
        // Artificials may no longer move off zero.
        for (int j = n_struct; j < tb.n_total; ++j) tb.ub(j) = 0.0;
    }

    Vec c2 = tb.c_int;
    tb.rebuild_costs(c2, s.shift_const);
    SimplexDriver phase2{tb, options.pricing, max_iters, &iters};
    const LoopResult r2 = phase2.run();

    LpSolution sol;
    sol.iterations = iters;
    if (r2 == LoopResult::UnboundedRay) {
        sol.status = Status::Unbounded;
        sol.x = Vec::Zero(n);
        sol.objective = lp.sense == Sense::Maximize ? infinity() : -infinity();
        return sol;
    }

    // Internal values.
    Vec xi = Vec::Zero(tb.n_total);
    for (int j = 0; j < tb.n_total; ++j) {
        if (tb.flipped[static_cast<size_t>(j)] && finite(tb.ub(j))) xi(j) = tb.ub(j);
    }
    for (int i = 0; i < m; ++i) {
        const int k = tb.basis[static_cast<size_t>(i)];
        const double rep = std::max(tb.rhs(i), 0.0);
        xi(k) = tb.flipped[static_cast<size_t>(k)] ? tb.ub(k) - rep : rep;
    }

    sol.x = Vec::Zero(n);
    for (int j = 0; j < n; ++j) {
        const ColMap& cm = s.cols[static_cast<size_t>(j)];
        sol.x(j) = cm.split ? xi(cm.col) - xi(cm.col_neg)
                            : cm.offset + cm.sign * xi(cm.col);
    }
    const double f_int = tb.z() + tb.cost_const;
    sol.objective = s.sense_factor * f_int;
    sol.status = Status::Optimal;

    sol.basis.reserve(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
        const int k = tb.basis[static_cast<size_t>(i)];
        int label = slack_of_row(i);
        if (k < s.n_struct_user) {
            for (int j = 0; j < n; ++j) {
                const ColMap& cm = s.cols[static_cast<size_t>(j)];
                if (cm.col == k || (cm.split && cm.col_neg == k)) {
                    label = j;
                    break;
                }
            }
        } else if (k < n_struct) {
            for (int r = 0; r < m; ++r) {
                if (s.slack_col[static_cast<size_t>(r)] == k) {
                    label = slack_of_row(r);
                    break;
                }
            }
        }
        sol.basis.push_back(label);
    }

    if (options.compute_duals) {
        sol.duals = Vec::Zero(m);
        for (int i = 0; i < m; ++i) {
            double y_int;
            const int sc = s.slack_col[static_cast<size_t>(i)];
            if (sc >= 0) {
                y_int = -tb.d(sc) / s.slack_coef[static_cast<size_t>(i)];
            } else {
                const int acn = art_col[static_cast<size_t>(i)];
                if (acn < 0) throw std::runtime_error("dual extraction: missing probe column");
                y_int = -tb.d(acn);
            }
            sol.duals(i) = s.sense_factor * s.row_sign[static_cast<size_t>(i)] * y_int;
        }
    }
    return sol;
}

LinearProgram fix_variables(const LinearProgram& lp,
                            const std::vector<std::pair<int, double>>& assignments) {
    LinearProgram out = lp;
    for (const auto& [idx, value] : assignments) {
        if (idx < 0 || idx >= lp.cols()) {
            throw OutOfBounds("fix_variables: variable index out of range");
        }
        if (value < lp.lo(idx) - 1e-9 || value > lp.hi(idx) + 1e-9) {
            throw OutOfBounds("fix_variables: value " + std::to_string(value) +
                              " outside bounds of variable " + std::to_string(idx));
        }
        out.lo(idx) = value;
        out.hi(idx) = value;
    }
    return out;
}

namespace {
std::string num(double v) {
    if (v == infinity()) return "inf";
    if (v == -infinity()) return "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}
}  // namespace

std::string dump(const LinearProgram& lp) {
    std::ostringstream os;
    os << "sense " << (lp.sense == Sense::Maximize ? "max" : "min") << "\n";
    os << "obj";
    for (int j = 0; j < lp.cols(); ++j) os << ' ' << num(lp.c(j));
    os << "\n";
    for (int i = 0; i < lp.rows(); ++i) {
        const char* r = lp.rel[static_cast<size_t>(i)] == Relation::LessEq   ? "<="
                        : lp.rel[static_cast<size_t>(i)] == Relation::Equal ? "="
                                                                            : ">=";
        os << "row " << r << ' ' << num(lp.b(i)) << " :";
        for (int j = 0; j < lp.cols(); ++j) os << ' ' << num(lp.a(i, j));
        os << "\n";
    }
    os << "bounds\n";
    for (int j = 0; j < lp.cols(); ++j) {
        os << num(lp.lo(j)) << ' ' << num(lp.hi(j)) << "\n";
    }
    return os.str();
}

}  // namespace windcast::lp
