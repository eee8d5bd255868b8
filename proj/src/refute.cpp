#include "rtmpi/refute.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace rtmpi {

std::string to_string(RefutationBranch branch) {
  switch (branch) {
    case RefutationBranch::alphabet:
      return "alphabet";
    case RefutationBranch::pigeonhole:
      return "pigeonhole";
    case RefutationBranch::simulation_failure:
      return "simulation-failure";
  }
  return {};
}

namespace {

std::vector<StateId> silent_closure(const Lts& lts, std::vector<StateId> from) {
  std::vector<char> seen(lts.size(), 0);
  std::deque<StateId> queue;
  std::vector<StateId> out;
  for (StateId s : from)
    if (!seen[s]) {
      seen[s] = 1;
      queue.push_back(s);
    }
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop_front();
    out.push_back(s);
    auto [b, e] = lts.outgoing(s);
    for (auto t = b; t != e; ++t)
      if (t->label.is_silent() && !seen[t->target]) {
        seen[t->target] = 1;
        queue.push_back(t->target);
      }
  }
  return out;
}

bool enables(const Lts& lts, StateId s, const ActionLabel& label) {
  auto [b, e] = lts.outgoing(s);
  return std::any_of(b, e, [&](const Transition& t) { return t.label == label; });
}

// 'y_i.0 on the left; on the right C_i with its one-step successors.
DistinguishingPlay pigeonhole_play(const Rtm& rtm, const Configuration& ci, const std::string& yi,
                                   const std::string& yj) {
  DistinguishingPlay play;
  play.left = Lts(2, 0, {{0, ActionLabel::output(yi), 1}});
  std::vector<Transition> edges;
  std::map<Configuration, StateId> ids{{ci, 0}};
  for (auto& [label, next] : step(rtm, ci)) {
    auto [it, fresh] = ids.try_emplace(next, static_cast<StateId>(ids.size()));
    edges.push_back({0, label, it->second});
  }
  play.right = Lts(ids.size(), 0, std::move(edges));
  auto [b, e] = play.right.outgoing(0);
  auto move = std::find_if(b, e, [&](const Transition& t) { return t.label == ActionLabel::output(yj); });
  play.nodes.push_back({0, 0, Side::right, *move, {}});
  return play;
}

}  // namespace

RefutationReport refute(const Rtm& candidate, std::size_t max_states) {
  RefutationReport report;
  report.trigger_count = trigger_count(candidate);
  const std::size_t n = report.trigger_count + 1;
  const auto& actions = candidate.actions();
  bool outside = false;
  for (std::size_t i = 1; i <= n; ++i) {
    ProbeOutcome probe;
    probe.name = "y" + std::to_string(i);
    probe.in_alphabet = std::find(actions.begin(), actions.end(), ActionLabel::output(probe.name)) != actions.end();
    outside = outside || !probe.in_alphabet;
    report.probes.push_back(std::move(probe));
  }
  if (outside) {
    report.branch = RefutationBranch::alphabet;
    return report;
  }

  RtmExploration ex = reachable_lts(candidate, max_states);
  report.complete = ex.complete;
  const Lts& lts = ex.lts;
  std::vector<StateId> start = silent_closure(lts, {lts.initial()});
  for (auto& probe : report.probes) {
    std::vector<StateId> after;
    for (StateId s : start) {
      auto [b, e] = lts.outgoing(s);
      for (auto t = b; t != e; ++t)
        if (t->label == ActionLabel::input("x", probe.name)) after.push_back(t->target);
    }
    for (StateId s : silent_closure(lts, after))
      if (enables(lts, s, ActionLabel::output(probe.name))) {
        probe.reached = ex.configurations[s];
        break;
      }
    if (!probe.reached) {
      report.branch = RefutationBranch::simulation_failure;
      return report;
    }
  }

  std::map<Trigger, std::size_t> first_with;
  for (std::size_t j = 0; j < n; ++j) {
    Trigger tr = report.probes[j].reached->trigger();
    auto [it, fresh] = first_with.try_emplace(tr, j);
    if (fresh) continue;
    std::size_t i = it->second;
    report.branch = RefutationBranch::pigeonhole;
    report.collision = {i, j};
    report.play = pigeonhole_play(candidate, *report.probes[i].reached, report.probes[i].name, report.probes[j].name);
    return report;
  }
  // Unreachable: n exceeds the number of triggers.
  report.branch = RefutationBranch::simulation_failure;
  return report;
}

std::string format_report(const RefutationReport& report) {
  std::string out;
  out += "specification: x(y).'y.0\n";
  out += "triggers: " + std::to_string(report.trigger_count) + "\n";
  out += "probes: " + std::to_string(report.probes.size()) + "\n";
  for (const auto& p : report.probes) {
    out += "  " + p.name + ": ";
    if (!p.in_alphabet) {
      out += "'" + p.name + " outside the candidate alphabet\n";
    } else if (p.reached) {
      Trigger tr = p.reached->trigger();
      out += "C = " + to_string(*p.reached) + " trigger (" + tr.state + ", " + tr.datum + ")\n";
    } else {
      out += "not probed\n";
    }
  }
  out += "branch: " + to_string(report.branch) + "\n";
  if (report.collision) {
    const auto& [i, j] = *report.collision;
    const auto& pi = report.probes[i];
    const auto& pj = report.probes[j];
    out += "collision: C_" + std::to_string(i + 1) + " and C_" + std::to_string(j + 1) + " share trigger (" +
           pi.reached->state + ", " + pi.reached->head + ")\n";
    out += "play: " + to_string(*pi.reached) + " -'" + pj.name + "-> but '" + pi.name + ".0 cannot answer '" +
           pj.name + "\n";
  }
  if (!report.complete) out += "note: reachable search cut at the state bound\n";
  out += report.refuted() ? "result: REFUTED\n" : "result: INCONCLUSIVE (candidate fails the simulation)\n";
  return out;
}

}  // namespace rtmpi
