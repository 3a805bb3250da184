#include "eclearn/infer.hpp"

#include <algorithm>

namespace eclearn {

namespace {

void instantiate(const Term& schema, const std::vector<std::string>& entities, size_t arg_idx,
                 std::map<std::string, std::string>& binding, std::vector<std::string>& used,
                 std::set<Term>& out) {
    if (arg_idx == schema.args.size()) {
        Term ground = Term::func(schema.name, {});
        for (const Term& a : schema.args) {
            if (a.is_var())
                ground.args.push_back(Term::constant(binding[a.name]));
            else
                ground.args.push_back(a);
        }
        out.insert(std::move(ground));
        return;
    }
    const Term& arg = schema.args[arg_idx];
    if (!arg.is_var()) {
        instantiate(schema, entities, arg_idx + 1, binding, used, out);
        return;
    }
    auto it = binding.find(arg.name);
    if (it != binding.end()) {
        instantiate(schema, entities, arg_idx + 1, binding, used, out);
        return;
    }
    for (const std::string& e : entities) {
        if (std::find(used.begin(), used.end(), e) != used.end()) continue;
        binding[arg.name] = e;
        used.push_back(e);
        instantiate(schema, entities, arg_idx + 1, binding, used, out);
        used.pop_back();
        binding.erase(arg.name);
    }
}

}  // namespace

std::set<Term> ground_instances(const Term& fluent_schema, const Interpretation& interp,
                                TimePoint t) {
    std::set<Term> out;
    if (!fluent_schema.is_func()) {
        if (fluent_schema.ground()) out.insert(fluent_schema);
        return out;
    }
    std::map<std::string, std::string> binding;
    std::vector<std::string> used;
    instantiate(fluent_schema, interp.entities_at(t), 0, binding, used, out);
    return out;
}

std::optional<Substitution> head_binding(const Atom& head, const Term& fluent, TimePoint t) {
    return head_binding(head, fluent, Term::number(static_cast<double>(t)));
}

std::optional<Substitution> head_binding(const Atom& head, const Term& fluent,
                                         const Term& time_term) {
    // Fast path for the usual head shape pred(schema, TimeVar).
    if (head.args.size() == 2 && head.args[1].is_var() && head.args[0].is_func() &&
        fluent.is_func() && head.args[0].name == fluent.name &&
        head.args[0].args.size() == fluent.args.size()) {
        Substitution theta;
        theta.emplace(head.args[1].name, time_term);
        bool ok = true;
        for (size_t i = 0; i < fluent.args.size() && ok; ++i) {
            const Term& slot = head.args[0].args[i];
            if (slot.is_var()) {
                auto [it, inserted] = theta.emplace(slot.name, fluent.args[i]);
                if (!inserted && !(it->second == fluent.args[i])) ok = false;
            } else if (!(slot == fluent.args[i])) {
                ok = false;
            }
        }
        if (ok) return theta;
        return std::nullopt;
    }
    Atom goal{head.predicate, {fluent, time_term}};
    return unify(head, goal, {});
}

bool fires_on(const Atom& head, const std::vector<Literal>& body, const Term& fluent,
              const Interpretation& interp, TimePoint t) {
    auto theta = head_binding(head, fluent, t);
    if (!theta) return false;
    return covers(body, interp, t, *theta);
}

std::set<Term> clause_firings(const Clause& c, const Interpretation& interp, TimePoint t) {
    std::set<Term> out;
    for (const Term& f : ground_instances(c.target_fluent(), interp, t)) {
        if (fires_on(c.head, c.body, f, interp, t)) out.insert(f);
    }
    return out;
}

std::map<TimePoint, StepLabels> classify_instances(const Theory& theory,
                                                   const Interpretation& interp,
                                                   FluentState& state) {
    std::map<TimePoint, StepLabels> out;
    for (TimePoint t = interp.t_start; t <= interp.t_end; ++t) {
        std::set<Term> initiated;
        std::set<Term> terminated;
        for (const Clause& c : theory.initiation) {
            auto fs = clause_firings(c, interp, t);
            initiated.insert(fs.begin(), fs.end());
        }
        for (const Clause& c : theory.termination) {
            auto fs = clause_firings(c, interp, t);
            terminated.insert(fs.begin(), fs.end());
        }
        state = step_infer(state, initiated, terminated);
        out[t + 1] = StepLabels{state.holding, interp.annotation_at(t + 1)};
    }
    return out;
}

InstanceLabel label_of(const StepLabels& labels, const Term& fluent) {
    bool inf = labels.inferred.count(fluent) > 0;
    bool ann = labels.annotated.count(fluent) > 0;
    if (inf && ann) return InstanceLabel::TP;
    if (inf) return InstanceLabel::FP;
    if (ann) return InstanceLabel::FN;
    return InstanceLabel::TN;
}

}  // namespace eclearn
