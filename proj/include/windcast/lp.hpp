#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>
#include <vector>

namespace windcast::lp {

enum class Sense { Maximize, Minimize };
enum class Relation { LessEq, Equal, GreaterEq };
enum class Status { Optimal, Infeasible, Unbounded };
enum class Pricing { Auto, Dantzig, Bland };

inline double infinity() { return std::numeric_limits<double>::infinity(); }

// Dense LP: sense c'x subject to a x (rel) b, lo <= x <= hi.
// lo entries may be -inf, hi entries +inf.
struct LinearProgram {
    Sense sense = Sense::Minimize;
    Eigen::VectorXd c;
    Eigen::MatrixXd a;
    std::vector<Relation> rel;
    Eigen::VectorXd b;
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;

    int rows() const { return static_cast<int>(a.rows()); }
    int cols() const { return static_cast<int>(a.cols()); }
    void validate() const;
};

// Basis entries name either a structural variable (its index) or the
// slack/surplus of a row, encoded as slack_of_row(r).
constexpr int slack_of_row(int row) { return -1 - row; }

struct SolveOptions {
    Pricing pricing = Pricing::Auto;
    long max_iterations = 0;  // 0 -> 100 * (rows + cols)
    // Optional starting basis (one entry per row, unordered set semantics).
    // If it is singular or infeasible the solver falls back to phase 1.
    std::vector<int> basis_hint;
    bool compute_duals = false;
};

struct LpSolution {
    Status status = Status::Optimal;
    Eigen::VectorXd x;
    double objective = 0.0;
    std::vector<int> basis;
    // duals[i] = d(objective)/d(b[i]) at the optimum, in the orientation of
    // the original program. Filled when compute_duals is set.
    Eigen::VectorXd duals;
    long iterations = 0;
};

struct InvalidProgram : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IterationLimit : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct OutOfBounds : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Two-phase primal simplex on a dense tableau with implicit variable bounds.
// Pricing::Auto uses Dantzig pricing and switches to Bland's rule when a long
// run of degenerate pivots indicates cycling risk.
LpSolution solve(const LinearProgram& lp, const SolveOptions& options = {});

// Copy of the program with lo = hi = value for every assignment.
LinearProgram fix_variables(const LinearProgram& lp,
                            const std::vector<std::pair<int, double>>& assignments);

// Fixed textual dump (objective row, then constraint rows, then bounds)
// used by golden-file tests.
std::string dump(const LinearProgram& lp);

}  // namespace windcast::lp
