#pragma once

#include <cstddef>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "matrix.hpp"
#include "rational.hpp"

namespace polyuniq {

/**
 * minimize c'x subject to A_eq x = b_eq, A_in x <= b_in, lower <= x <= upper.
 * Variables are free unless a bound is set.
 */
class LinearProgram
{
public:
    explicit LinearProgram(std::size_t num_vars)
        : objective_(num_vars, Rational(0)), lower_(num_vars), upper_(num_vars)
    {
    }

    std::size_t num_vars() const { return objective_.size(); }

    void set_objective(Vec<Rational> c)
    {
        check(c);
        objective_ = std::move(c);
    }
    void add_eq(Vec<Rational> row, Rational rhs)
    {
        check(row);
        eq_.push_back(std::move(row));
        eq_rhs_.push_back(std::move(rhs));
    }
    void add_le(Vec<Rational> row, Rational rhs)
    {
        check(row);
        in_.push_back(std::move(row));
        in_rhs_.push_back(std::move(rhs));
    }
    void add_ge(Vec<Rational> row, const Rational& rhs)
    {
        for (auto& v : row) v = -v;
        add_le(std::move(row), Rational(-rhs));
    }
    void set_lower(std::size_t j, Rational v) { lower_.at(j) = std::move(v); }
    void set_upper(std::size_t j, Rational v) { upper_.at(j) = std::move(v); }
    void set_nonnegative(std::size_t j) { set_lower(j, Rational(0)); }

    const Vec<Rational>& objective() const { return objective_; }
    const std::vector<Vec<Rational>>& eq_rows() const { return eq_; }
    const Vec<Rational>& eq_rhs() const { return eq_rhs_; }
    const std::vector<Vec<Rational>>& le_rows() const { return in_; }
    const Vec<Rational>& le_rhs() const { return in_rhs_; }
    const std::optional<Rational>& lower(std::size_t j) const { return lower_.at(j); }
    const std::optional<Rational>& upper(std::size_t j) const { return upper_.at(j); }

    /** Exact check of every constraint and bound. */
    bool satisfied_by(const Vec<Rational>& x) const
    {
        if (x.size() != num_vars()) return false;
        for (std::size_t i = 0; i < eq_.size(); ++i)
            if (dot(eq_[i], x) != eq_rhs_[i]) return false;
        for (std::size_t i = 0; i < in_.size(); ++i)
            if (dot(in_[i], x) > in_rhs_[i]) return false;
        for (std::size_t j = 0; j < num_vars(); ++j) {
            if (lower_[j] && x[j] < *lower_[j]) return false;
            if (upper_[j] && x[j] > *upper_[j]) return false;
        }
        return true;
    }

    /** Plain-text dump for debugging. */
    std::string dump() const
    {
        std::ostringstream out;
        out << "minimize";
        for (std::size_t j = 0; j < num_vars(); ++j) out << ' ' << objective_[j].str();
        out << '\n';
        for (std::size_t i = 0; i < eq_.size(); ++i) {
            out << "eq";
            for (const auto& v : eq_[i]) out << ' ' << v.str();
            out << " = " << eq_rhs_[i].str() << '\n';
        }
        for (std::size_t i = 0; i < in_.size(); ++i) {
            out << "le";
            for (const auto& v : in_[i]) out << ' ' << v.str();
            out << " <= " << in_rhs_[i].str() << '\n';
        }
        for (std::size_t j = 0; j < num_vars(); ++j) {
            out << "x" << j << " in [" << (lower_[j] ? lower_[j]->str() : "-inf") << ", "
                << (upper_[j] ? upper_[j]->str() : "inf") << "]\n";
        }
        return out.str();
    }

private:
    void check(const Vec<Rational>& row) const
    {
        if (row.size() != num_vars()) throw std::invalid_argument("LP row has wrong number of entries");
    }

    Vec<Rational> objective_;
    std::vector<Vec<Rational>> eq_;
    Vec<Rational> eq_rhs_;
    std::vector<Vec<Rational>> in_;
    Vec<Rational> in_rhs_;
    std::vector<std::optional<Rational>> lower_, upper_;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult
{
    LpStatus status = LpStatus::infeasible;
    Rational value;
    Vec<Rational> point;

    bool optimal() const { return status == LpStatus::optimal; }
};

namespace detail {

/** Dense simplex tableau over the rationals, Bland's rule throughout. */
class Tableau
{
public:
    // rows_[i] holds the constraint coefficients followed by the right-hand side.
    std::vector<Vec<Rational>> rows;
    std::vector<std::size_t> basis;
    std::size_t cols = 0;

    void pivot(std::size_t r, std::size_t c, Vec<Rational>& cost, Rational& cost_rhs)
    {
        Vec<Rational>& pr = rows[r];
        const Rational inv = Rational(1) / pr[c];
        for (auto& v : pr)
            if (v != 0) v *= inv;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == r) continue;
            Vec<Rational>& row = rows[i];
            if (row[c] == 0) continue;
            const Rational f = row[c];
            for (std::size_t j = 0; j <= cols; ++j)
                if (pr[j] != 0) row[j] -= f * pr[j];
        }
        if (cost[c] != 0) {
            const Rational f = cost[c];
            for (std::size_t j = 0; j < cols; ++j)
                if (pr[j] != 0) cost[j] -= f * pr[j];
            cost_rhs -= f * pr[cols];
        }
        basis[r] = c;
    }

    /**
     * Minimize with reduced costs `cost` (already expressed in the current
     * basis). Columns at or beyond `allowed` never enter. Returns false when
     * unbounded.
     */
    bool run(Vec<Rational>& cost, Rational& cost_rhs, std::size_t allowed)
    {
        for (;;) {
            std::size_t enter = allowed;
            for (std::size_t j = 0; j < allowed; ++j) {
                if (cost[j] < 0) {
                    enter = j;
                    break;
                }
            }
            if (enter == allowed) return true;
            std::size_t leave = rows.size();
            Rational best;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (rows[i][enter] <= 0) continue;
                Rational ratio = rows[i][cols] / rows[i][enter];
                if (leave == rows.size() || ratio < best || (ratio == best && basis[i] < basis[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave == rows.size()) return false;
            pivot(leave, enter, cost, cost_rhs);
        }
    }
};

} // namespace detail

/**
 * Exact two-phase primal simplex. Deterministic: the same program always
 * yields the same vertex.
 */
inline LpResult lp_solve(const LinearProgram& lp)
{
    const std::size_t n = lp.num_vars();

    // Map each original variable onto nonnegative standard-form columns:
    // x_j = offset_j + sum_k coef_k * t_k.
    struct Piece { std::size_t col; int coef; };
    std::vector<std::vector<Piece>> pieces(n);
    Vec<Rational> offset(n, Rational(0));
    std::size_t ncols = 0;
    std::vector<std::pair<std::size_t, Rational>> upper_rows;  // t_col <= value
    for (std::size_t j = 0; j < n; ++j) {
        const auto& lo = lp.lower(j);
        const auto& up = lp.upper(j);
        if (lo) {
            offset[j] = *lo;
            pieces[j].push_back({ncols, 1});
            if (up) {
                if (*up < *lo) return LpResult{LpStatus::infeasible, Rational(0), {}};
                upper_rows.emplace_back(ncols, *up - *lo);
            }
            ++ncols;
        } else if (up) {
            offset[j] = *up;
            pieces[j].push_back({ncols++, -1});
        } else {
            pieces[j].push_back({ncols++, 1});
            pieces[j].push_back({ncols++, -1});
        }
    }
    const std::size_t structural = ncols;

    auto expand = [&](const Vec<Rational>& row, Rational rhs) {
        Vec<Rational> out(structural, Rational(0));
        for (std::size_t j = 0; j < n; ++j) {
            if (row[j] == 0) continue;
            rhs -= row[j] * offset[j];
            for (const auto& pc : pieces[j]) out[pc.col] += pc.coef > 0 ? row[j] : Rational(-row[j]);
        }
        return std::make_pair(out, rhs);
    };

    struct StdRow { Vec<Rational> a; Rational rhs; bool slack; };
    std::vector<StdRow> std_rows;
    for (std::size_t i = 0; i < lp.eq_rows().size(); ++i) {
        auto [a, r] = expand(lp.eq_rows()[i], lp.eq_rhs()[i]);
        std_rows.push_back({std::move(a), std::move(r), false});
    }
    for (std::size_t i = 0; i < lp.le_rows().size(); ++i) {
        auto [a, r] = expand(lp.le_rows()[i], lp.le_rhs()[i]);
        std_rows.push_back({std::move(a), std::move(r), true});
    }
    for (const auto& [col, value] : upper_rows) {
        Vec<Rational> a(structural, Rational(0));
        a[col] = 1;
        std_rows.push_back({std::move(a), value, true});
    }

    const std::size_t m = std_rows.size();
    std::size_t num_slack = 0;
    for (const auto& r : std_rows) num_slack += r.slack ? 1 : 0;

    // Columns: structural | slacks | artificials | rhs.
    const std::size_t slack_start = structural;
    const std::size_t art_start = structural + num_slack;
    detail::Tableau t;
    t.cols = art_start + m;
    t.rows.assign(m, Vec<Rational>(t.cols + 1, Rational(0)));
    t.basis.assign(m, 0);

    std::vector<bool> needs_artificial(m, true);
    std::size_t slack_col = slack_start;
    for (std::size_t i = 0; i < m; ++i) {
        auto& row = t.rows[i];
        for (std::size_t j = 0; j < structural; ++j) row[j] = std_rows[i].a[j];
        row[t.cols] = std_rows[i].rhs;
        std::size_t my_slack = t.cols;
        if (std_rows[i].slack) {
            my_slack = slack_col++;
            row[my_slack] = 1;
        }
        if (row[t.cols] < 0)
            for (auto& v : row) v = -v;
        if (my_slack != t.cols && row[my_slack] == 1) {
            t.basis[i] = my_slack;
            needs_artificial[i] = false;
        } else {
            row[art_start + i] = 1;
            t.basis[i] = art_start + i;
        }
    }

    // Phase one: minimize the sum of artificials.
    Vec<Rational> cost(t.cols, Rational(0));
    Rational cost_rhs = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (!needs_artificial[i]) continue;
        for (std::size_t j = 0; j < t.cols; ++j)
            if (j < art_start) cost[j] -= t.rows[i][j];
        cost_rhs -= t.rows[i][t.cols];
    }
    t.run(cost, cost_rhs, art_start);
    if (cost_rhs != 0) return LpResult{LpStatus::infeasible, Rational(0), {}};

    // Drive remaining artificials out of the basis; drop redundant rows.
    for (std::size_t i = 0; i < t.rows.size();) {
        if (t.basis[i] < art_start) {
            ++i;
            continue;
        }
        std::size_t c = art_start;
        for (std::size_t j = 0; j < art_start; ++j)
            if (t.rows[i][j] != 0) {
                c = j;
                break;
            }
        if (c == art_start) {
            t.rows.erase(t.rows.begin() + static_cast<std::ptrdiff_t>(i));
            t.basis.erase(t.basis.begin() + static_cast<std::ptrdiff_t>(i));
            continue;
        }
        t.pivot(i, c, cost, cost_rhs);
        ++i;
    }

    // Phase two with the true objective, reduced against the basis.
    Vec<Rational> c2(t.cols, Rational(0));
    Rational c2_rhs = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const Rational& cj = lp.objective()[j];
        if (cj == 0) continue;
        c2_rhs -= cj * offset[j];
        for (const auto& pc : pieces[j]) c2[pc.col] += pc.coef > 0 ? cj : Rational(-cj);
    }
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const Rational f = c2[t.basis[i]];
        if (f == 0) continue;
        for (std::size_t j = 0; j < t.cols; ++j)
            if (t.rows[i][j] != 0) c2[j] -= f * t.rows[i][j];
        c2_rhs -= f * t.rows[i][t.cols];
    }
    if (!t.run(c2, c2_rhs, art_start)) return LpResult{LpStatus::unbounded, Rational(0), {}};

    Vec<Rational> tvals(t.cols, Rational(0));
    for (std::size_t i = 0; i < t.rows.size(); ++i) tvals[t.basis[i]] = t.rows[i][t.cols];
    LpResult res;
    res.status = LpStatus::optimal;
    res.point.assign(n, Rational(0));
    for (std::size_t j = 0; j < n; ++j) {
        Rational v = offset[j];
        for (const auto& pc : pieces[j]) v += pc.coef > 0 ? tvals[pc.col] : Rational(-tvals[pc.col]);
        res.point[j] = v;
    }
    res.value = dot(lp.objective(), res.point);
    return res;
}

/** Feasibility only: a point satisfying every constraint, or nullopt. */
inline std::optional<Vec<Rational>> lp_feasible(const LinearProgram& lp)
{
    LinearProgram copy = lp;
    copy.set_objective(Vec<Rational>(lp.num_vars(), Rational(0)));
    LpResult r = lp_solve(copy);
    if (!r.optimal()) return std::nullopt;
    return r.point;
}

} // namespace polyuniq
