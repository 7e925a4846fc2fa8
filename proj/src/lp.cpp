#include "causumx/lp.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "causumx/common.hpp"

namespace causumx::lp {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-7;
constexpr double kRatioTol = 1e-9;

enum class VarState { Basic, AtLower, AtUpper };

// Full-tableau primal simplex with explicit [0, u] variable bounds, Bland's
// rule for entering/leaving choices, and a standard two-phase start.
class Simplex {
public:
    explicit Simplex(const Problem& p) : prob_(p) { build(); }

    Solution run() {
        // Phase 1: maximize -(sum of artificials).
        if (needPhase1_) {
            setPhaseObjective(true);
            iterate();
            double infeasibility = 0.0;
            for (std::size_t j = firstArtificial_; j < numVars_; ++j) infeasibility += value(j);
            if (infeasibility > kFeasTol) {
                Solution s;
                s.status = SolveStatus::Infeasible;
                return s;
            }
            pinArtificials();
        }
        setPhaseObjective(false);
        iterate();
        return extract();
    }

private:
    const Problem& prob_;
    std::size_t numStruct_ = 0;
    std::size_t numRows_ = 0;
    std::size_t numVars_ = 0;
    std::size_t firstArtificial_ = 0;
    bool needPhase1_ = false;

    std::vector<std::vector<double>> tab_;  // numRows_ x numVars_
    std::vector<double> xB_;
    std::vector<std::size_t> basis_;
    std::vector<VarState> state_;
    std::vector<double> upper_;
    std::vector<double> cost_;   // current phase objective
    std::vector<double> z_;      // reduced costs
    std::vector<std::size_t> unitColumn_;  // per row: slack/surplus/artificial column
    std::vector<double> unitSign_;         // +1 slack/artificial, -1 surplus

    double value(std::size_t j) const {
        switch (state_[j]) {
            case VarState::AtLower: return 0.0;
            case VarState::AtUpper: return upper_[j];
            case VarState::Basic:
                for (std::size_t i = 0; i < numRows_; ++i) {
                    if (basis_[i] == j) return xB_[i];
                }
                return 0.0;
        }
        return 0.0;
    }

    void build() {
        numStruct_ = prob_.objective.size();
        numRows_ = prob_.rows.size();
        for (const auto& row : prob_.rows) {
            if (row.coeffs.size() != numStruct_) {
                throw EngineError("lp: constraint width does not match variable count");
            }
        }

        // Normalize to nonnegative right-hand sides.
        std::vector<std::vector<double>> a(numRows_, std::vector<double>(numStruct_, 0.0));
        std::vector<double> rhs(numRows_);
        std::vector<Sense> sense(numRows_);
        for (std::size_t i = 0; i < numRows_; ++i) {
            a[i] = prob_.rows[i].coeffs;
            rhs[i] = prob_.rows[i].rhs;
            sense[i] = prob_.rows[i].sense;
            if (rhs[i] < 0.0) {
                for (auto& v : a[i]) v = -v;
                rhs[i] = -rhs[i];
                if (sense[i] == Sense::LessEq) sense[i] = Sense::GreaterEq;
                else if (sense[i] == Sense::GreaterEq) sense[i] = Sense::LessEq;
            }
        }

        std::size_t numSlack = 0;
        for (auto s : sense) {
            if (s != Sense::Equal) ++numSlack;
        }
        std::size_t numArtificial = 0;
        for (std::size_t i = 0; i < numRows_; ++i) {
            if (sense[i] != Sense::LessEq) ++numArtificial;
        }
        firstArtificial_ = numStruct_ + numSlack;
        numVars_ = firstArtificial_ + numArtificial;
        needPhase1_ = numArtificial > 0;

        tab_.assign(numRows_, std::vector<double>(numVars_, 0.0));
        upper_.assign(numVars_, kInfinity);
        for (std::size_t j = 0; j < numStruct_; ++j) {
            upper_[j] = j < prob_.upper.size() ? prob_.upper[j] : kInfinity;
            if (upper_[j] < 0.0) throw EngineError("lp: negative upper bound");
        }
        state_.assign(numVars_, VarState::AtLower);
        xB_.assign(numRows_, 0.0);
        basis_.assign(numRows_, 0);
        unitColumn_.assign(numRows_, 0);
        unitSign_.assign(numRows_, 1.0);

        std::size_t slackCursor = numStruct_;
        std::size_t artCursor = firstArtificial_;
        for (std::size_t i = 0; i < numRows_; ++i) {
            for (std::size_t j = 0; j < numStruct_; ++j) tab_[i][j] = a[i][j];
            if (sense[i] == Sense::LessEq) {
                tab_[i][slackCursor] = 1.0;
                unitColumn_[i] = slackCursor;
                unitSign_[i] = 1.0;
                basis_[i] = slackCursor;
                state_[slackCursor] = VarState::Basic;
                xB_[i] = rhs[i];
                ++slackCursor;
            } else if (sense[i] == Sense::GreaterEq) {
                tab_[i][slackCursor] = -1.0;
                unitColumn_[i] = slackCursor;
                unitSign_[i] = -1.0;
                ++slackCursor;
                tab_[i][artCursor] = 1.0;
                basis_[i] = artCursor;
                state_[artCursor] = VarState::Basic;
                xB_[i] = rhs[i];
                ++artCursor;
            } else {
                tab_[i][artCursor] = 1.0;
                unitColumn_[i] = artCursor;
                unitSign_[i] = 1.0;
                basis_[i] = artCursor;
                state_[artCursor] = VarState::Basic;
                xB_[i] = rhs[i];
                ++artCursor;
            }
        }
    }

    void setPhaseObjective(bool phase1) {
        cost_.assign(numVars_, 0.0);
        if (phase1) {
            for (std::size_t j = firstArtificial_; j < numVars_; ++j) cost_[j] = -1.0;
        } else {
            for (std::size_t j = 0; j < numStruct_; ++j) cost_[j] = prob_.objective[j];
        }
        // z_j = c_j - c_B . (B^-1 A_j), from the current tableau.
        z_.assign(numVars_, 0.0);
        for (std::size_t j = 0; j < numVars_; ++j) {
            double dot = 0.0;
            for (std::size_t i = 0; i < numRows_; ++i) {
                const double cb = cost_[basis_[i]];
                if (cb != 0.0) dot += cb * tab_[i][j];
            }
            z_[j] = cost_[j] - dot;
        }
    }

    // Once feasible, artificials are fixed at zero (driven out of the basis
    // where the row is not redundant).
    void pinArtificials() {
        for (std::size_t i = 0; i < numRows_; ++i) {
            const std::size_t b = basis_[i];
            if (b < firstArtificial_) continue;
            std::size_t enter = numVars_;
            for (std::size_t j = 0; j < firstArtificial_; ++j) {
                if (state_[j] != VarState::Basic && std::fabs(tab_[i][j]) > kPivotTol) {
                    enter = j;
                    break;
                }
            }
            if (enter == numVars_) continue;  // redundant row; artificial stays at 0
            pivot(i, enter, VarState::AtLower, 0.0);
        }
        for (std::size_t j = firstArtificial_; j < numVars_; ++j) upper_[j] = 0.0;
    }

    bool fixed(std::size_t j) const { return upper_[j] <= 0.0 && state_[j] != VarState::Basic; }

    void iterate() {
        const std::size_t pivotLimit = 20000 + 200 * (numRows_ + numVars_);
        for (std::size_t step = 0; step < pivotLimit; ++step) {
            // Bland: smallest-index improving nonbasic variable.
            std::size_t enter = numVars_;
            int dir = 0;
            for (std::size_t j = 0; j < numVars_; ++j) {
                if (state_[j] == VarState::Basic || fixed(j)) continue;
                if (state_[j] == VarState::AtLower && z_[j] > kPivotTol) {
                    enter = j;
                    dir = 1;
                    break;
                }
                if (state_[j] == VarState::AtUpper && z_[j] < -kPivotTol) {
                    enter = j;
                    dir = -1;
                    break;
                }
            }
            if (enter == numVars_) return;  // optimal for this phase

            double tMax = kInfinity;
            bool ownBound = false;
            std::size_t leaveRow = numRows_;
            VarState leaveTo = VarState::AtLower;
            if (std::isfinite(upper_[enter])) {
                tMax = upper_[enter];
                ownBound = true;
            }
            for (std::size_t i = 0; i < numRows_; ++i) {
                const double w = dir * tab_[i][enter];
                double limit;
                VarState to;
                if (w > kRatioTol) {
                    limit = xB_[i] / w;
                    to = VarState::AtLower;
                } else if (w < -kRatioTol && std::isfinite(upper_[basis_[i]])) {
                    limit = (upper_[basis_[i]] - xB_[i]) / (-w);
                    to = VarState::AtUpper;
                } else {
                    continue;
                }
                if (limit < -kRatioTol) limit = 0.0;
                const bool smaller = limit < tMax - kRatioTol;
                const bool tie = std::fabs(limit - tMax) <= kRatioTol;
                // Prefer row pivots on ties (Bland by basic variable index).
                if (smaller || (tie && (ownBound || (leaveRow < numRows_ && basis_[i] < basis_[leaveRow])))) {
                    tMax = std::max(0.0, std::min(tMax, limit));
                    ownBound = false;
                    leaveRow = i;
                    leaveTo = to;
                }
            }
            if (!std::isfinite(tMax)) throw EngineError("lp: unbounded objective");

            if (ownBound) {
                // Bound flip: no basis change.
                for (std::size_t i = 0; i < numRows_; ++i) xB_[i] -= dir * tab_[i][enter] * tMax;
                state_[enter] = dir > 0 ? VarState::AtUpper : VarState::AtLower;
                continue;
            }
            const double enterValue =
                (state_[enter] == VarState::AtLower ? 0.0 : upper_[enter]) + dir * tMax;
            for (std::size_t i = 0; i < numRows_; ++i) {
                if (i != leaveRow) xB_[i] -= dir * tab_[i][enter] * tMax;
            }
            pivot(leaveRow, enter, leaveTo, enterValue);
        }
        throw EngineError("lp: pivot limit exceeded");
    }

    void pivot(std::size_t row, std::size_t enter, VarState leaveTo, double enterValue) {
        const std::size_t leaving = basis_[row];
        state_[leaving] = leaveTo;
        basis_[row] = enter;
        state_[enter] = VarState::Basic;
        xB_[row] = enterValue;

        const double p = tab_[row][enter];
        for (auto& v : tab_[row]) v /= p;
        for (std::size_t i = 0; i < numRows_; ++i) {
            if (i == row) continue;
            const double f = tab_[i][enter];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < numVars_; ++j) tab_[i][j] -= f * tab_[row][j];
        }
        const double zf = z_[enter];
        if (zf != 0.0) {
            for (std::size_t j = 0; j < numVars_; ++j) z_[j] -= zf * tab_[row][j];
        }
    }

    Solution extract() const {
        Solution s;
        s.status = SolveStatus::Optimal;
        s.x.assign(numStruct_, 0.0);
        for (std::size_t j = 0; j < numStruct_; ++j) s.x[j] = value(j);
        s.objective = 0.0;
        for (std::size_t j = 0; j < numStruct_; ++j) s.objective += prob_.objective[j] * s.x[j];
        s.rowDuals.assign(numRows_, 0.0);
        for (std::size_t i = 0; i < numRows_; ++i) {
            // The unit column of each row carries B^-1 e_i, so its reduced
            // cost recovers the dual up to the column's sign.
            s.rowDuals[i] = -unitSign_[i] * z_[unitColumn_[i]];
            // Duals are reported for the original row orientation.
            if (prob_.rows[i].rhs < 0.0) s.rowDuals[i] = -s.rowDuals[i];
        }
        return s;
    }
};

}  // namespace

Solution solve(const Problem& p) {
    Simplex simplex(p);
    return simplex.run();
}

}  // namespace causumx::lp
