#include "maxocc/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

namespace maxocc {

namespace {
constexpr double kRowSumTolerance = 1e-9;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
}  // namespace

bool Mdp::is_absorbing(StateId s) const {
    if (available_count(s) != 1) return false;
    for (ActionId a = 0; a < n_actions_; ++a) {
        if (!available(s, a)) continue;
        const TransitionRow r = row(s, a);
        return r.size() == 1 && r.next[0] == s;
    }
    return false;
}

MdpBuilder::MdpBuilder(std::size_t n_states, std::size_t n_actions, double gamma, double alpha,
                       double beta) {
    if (n_states == 0 || n_actions == 0) throw DomainError("empty state or action set");
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("gamma must lie in (0,1)");
    if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
    if (beta < 0.0) throw DomainError("beta must be non-negative");
    mdp_.n_states_ = n_states;
    mdp_.n_actions_ = n_actions;
    mdp_.gamma_ = gamma;
    mdp_.alpha_ = alpha;
    mdp_.beta_ = beta;
    mdp_.available_.assign(n_states * n_actions, 0);
    mdp_.row_begin_.assign(n_states * n_actions + 1, 0);
}

void MdpBuilder::reserve(std::uint64_t entries) {
    mdp_.succ_.reserve(entries);
    mdp_.prob_.reserve(entries);
}

void MdpBuilder::begin_row(StateId s, ActionId a) {
    const std::int64_t r = static_cast<std::int64_t>(std::size_t(s) * mdp_.n_actions_ + a);
    if (finished_) throw DomainError("builder already finished");
    if (r <= current_row_) throw DomainError("rows must be opened in increasing (state, action) order");
    // close out the previous row; skipped rows in between stay empty
    const auto here = static_cast<std::uint64_t>(mdp_.succ_.size());
    for (std::int64_t i = current_row_ + 1; i <= r; ++i) mdp_.row_begin_[i] = here;
    current_row_ = r;
    mdp_.available_[r] = 1;
}

void MdpBuilder::add(StateId next, double prob) {
    if (current_row_ < 0) throw DomainError("add() before begin_row()");
    if (next >= mdp_.n_states_) throw DomainError("successor id out of range");
    mdp_.succ_.push_back(next);
    mdp_.prob_.push_back(prob);
}

Mdp MdpBuilder::finish(bool run_validate) {
    if (finished_) throw DomainError("builder already finished");
    finished_ = true;
    const std::size_t n_rows = mdp_.n_states_ * mdp_.n_actions_;
    const auto total = static_cast<std::uint64_t>(mdp_.succ_.size());
    for (std::int64_t i = current_row_ + 1; i <= static_cast<std::int64_t>(n_rows); ++i)
        mdp_.row_begin_[i] = total;

    // sort rows by successor id, merging duplicates
    std::vector<std::pair<StateId, double>> scratch;
    std::vector<StateId> new_succ;
    std::vector<double> new_prob;
    new_succ.reserve(mdp_.succ_.size());
    new_prob.reserve(mdp_.prob_.size());
    std::vector<std::uint64_t> new_begin(n_rows + 1, 0);
    for (std::size_t r = 0; r < n_rows; ++r) {
        new_begin[r] = new_succ.size();
        const std::uint64_t b = mdp_.row_begin_[r], e = mdp_.row_begin_[r + 1];
        scratch.clear();
        for (std::uint64_t i = b; i < e; ++i) scratch.emplace_back(mdp_.succ_[i], mdp_.prob_[i]);
        std::sort(scratch.begin(), scratch.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        for (const auto& [j, p] : scratch) {
            if (!new_succ.empty() && new_begin[r] < new_succ.size() && new_succ.back() == j)
                new_prob.back() += p;
            else {
                new_succ.push_back(j);
                new_prob.push_back(p);
            }
        }
    }
    new_begin[n_rows] = new_succ.size();
    mdp_.succ_ = std::move(new_succ);
    mdp_.prob_ = std::move(new_prob);
    mdp_.row_begin_ = std::move(new_begin);

    if (run_validate) validate(mdp_);
    return std::move(mdp_);
}

void validate(const Mdp& mdp) {
    for (StateId s = 0; s < mdp.n_states(); ++s) {
        bool any = false;
        for (ActionId a = 0; a < mdp.n_actions(); ++a) {
            const TransitionRow r = mdp.row(s, a);
            if (!mdp.available(s, a)) {
                if (!r.empty()) throw GhostTransitionError(s, a);
                continue;
            }
            any = true;
            double sum = 0.0;
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (r.prob[i] < 0.0)
                    throw RowSumError(s, a, r.prob[i], "negative probability");
                sum += r.prob[i];
            }
            if (std::abs(sum - 1.0) > kRowSumTolerance) throw RowSumError(s, a, sum);
        }
        if (!any) throw NoActionError(s);
    }
}

double discrete_entropy(std::span<const double> p) {
    double sum = 0.0;
    for (double v : p) {
        if (v < 0.0) throw NotADistribution(v);
        sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) throw NotADistribution(sum);
    double h = 0.0;
    for (double v : p)
        if (v > 0.0) h -= v * std::log(v);
    return h;
}

EntropyCache build_entropy_cache(const Mdp& mdp) {
    EntropyCache cache(mdp.n_states(), mdp.n_actions());
    const double scale = mdp.beta() / mdp.alpha();
    if (mdp.beta() == 0.0) return cache;  // weight annihilates the term
    for (StateId s = 0; s < mdp.n_states(); ++s)
        for (ActionId a = 0; a < mdp.n_actions(); ++a)
            if (mdp.available(s, a)) cache.at(s, a) = scale * discrete_entropy(mdp.row(s, a).prob);
    return cache;
}

std::vector<double> policy_transition_matrix(const Mdp& mdp, const Policy& policy) {
    const std::size_t n = mdp.n_states();
    if (n > 8192) throw DomainError("dense state-to-state matrix requested for a large model");
    validate_policy(mdp, policy);
    std::vector<double> m(n * n, 0.0);
    for (StateId s = 0; s < n; ++s)
        for (ActionId a = 0; a < mdp.n_actions(); ++a) {
            const double pa = policy.at(s, a);
            if (pa == 0.0) continue;
            const TransitionRow r = mdp.row(s, a);
            for (std::size_t i = 0; i < r.size(); ++i) m[s * n + r.next[i]] += pa * r.prob[i];
        }
    return m;
}

void validate_policy(const Mdp& mdp, const Policy& policy) {
    if (policy.n_states != mdp.n_states() || policy.n_actions != mdp.n_actions())
        throw DomainError("policy shape does not match the model");
    for (StateId s = 0; s < mdp.n_states(); ++s) {
        double sum = 0.0;
        for (ActionId a = 0; a < mdp.n_actions(); ++a) {
            const double v = policy.at(s, a);
            if (v < 0.0) throw NotADistribution(v);
            if (!mdp.available(s, a) && v != 0.0) throw UnavailableAction(s, a);
            sum += v;
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance) throw NotADistribution(sum);
    }
}

std::string Mdp::to_json() const {
    std::ostringstream out;
    out << "{\"n_states\":" << n_states_ << ",\"n_actions\":" << n_actions_
        << ",\"gamma\":" << fmt17(gamma_) << ",\"alpha\":" << fmt17(alpha_)
        << ",\"beta\":" << fmt17(beta_) << ",\"availability\":[";
    for (StateId s = 0; s < n_states_; ++s) {
        if (s) out << ",";
        out << "[";
        for (ActionId a = 0; a < n_actions_; ++a) {
            if (a) out << ",";
            out << (available(s, a) ? 1 : 0);
        }
        out << "]";
    }
    out << "],\"transitions\":[";
    bool first = true;
    for (StateId s = 0; s < n_states_; ++s)
        for (ActionId a = 0; a < n_actions_; ++a) {
            if (!available(s, a)) continue;
            if (!first) out << ",";
            first = false;
            out << "{\"s\":" << s << ",\"a\":" << a << ",\"rows\":[";
            const TransitionRow r = row(s, a);
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (i) out << ",";
                out << "[" << r.next[i] << "," << fmt17(r.prob[i]) << "]";
            }
            out << "]}";
        }
    out << "]}";
    return out.str();
}

Mdp Mdp::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    for (const char* key : {"n_states", "n_actions", "gamma", "alpha", "beta", "availability",
                            "transitions"})
        if (!j.contains(key)) throw DomainError(std::string("mdp json missing field '") + key + "'");
    const std::size_t ns = j.at("n_states").get<std::size_t>();
    const std::size_t na = j.at("n_actions").get<std::size_t>();
    MdpBuilder builder(ns, na, j.at("gamma").get<double>(), j.at("alpha").get<double>(),
                       j.at("beta").get<double>());
    const auto& avail = j.at("availability");
    if (avail.size() != ns) throw DomainError("availability has wrong number of rows");

    struct RowRec {
        StateId s;
        ActionId a;
        std::vector<std::pair<StateId, double>> entries;
    };
    std::vector<RowRec> rows;
    for (const auto& t : j.at("transitions")) {
        RowRec rec;
        rec.s = t.at("s").get<StateId>();
        rec.a = t.at("a").get<ActionId>();
        for (const auto& e : t.at("rows"))
            rec.entries.emplace_back(e.at(0).get<StateId>(), e.at(1).get<double>());
        rows.push_back(std::move(rec));
    }
    std::sort(rows.begin(), rows.end(), [na](const RowRec& x, const RowRec& y) {
        return std::size_t(x.s) * na + x.a < std::size_t(y.s) * na + y.a;
    });
    for (const auto& rec : rows) {
        if (rec.s >= ns || rec.a >= na) throw DomainError("transition row out of range");
        if (avail.at(rec.s).at(rec.a).get<int>() == 0) throw GhostTransitionError(rec.s, rec.a);
        builder.begin_row(rec.s, rec.a);
        for (const auto& [next, p] : rec.entries) builder.add(next, p);
    }
    Mdp mdp = builder.finish(false);
    // availability may mark actions that have no transition row; that is a
    // validation error, reported by validate() as a zero-mass row
    for (StateId s = 0; s < ns; ++s)
        for (ActionId a = 0; a < na; ++a)
            if (avail.at(s).at(a).get<int>() != 0 && !mdp.available(s, a))
                throw RowSumError(s, a, 0.0, "available action without transitions");
    validate(mdp);
    return mdp;
}

Mdp Mdp::load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

void Mdp::save_json_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DomainError("cannot write " + path);
    out << to_json();
}

}  // namespace maxocc
