#include "rtmpi/rtm.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace rtmpi {

void Configuration::normalize() {
  auto lead = std::find_if(left.begin(), left.end(), [](const std::string& d) { return d != blank_symbol; });
  left.erase(left.begin(), lead);
  while (!right.empty() && right.back() == blank_symbol) right.pop_back();
}

bool Configuration::is_normal() const {
  return (left.empty() || left.front() != blank_symbol) && (right.empty() || right.back() != blank_symbol);
}

std::string to_string(const Configuration& c) {
  std::string out = "(" + c.state + ",";
  for (const auto& d : c.left) out += " " + d;
  out += " [" + c.head + "]";
  for (const auto& d : c.right) out += " " + d;
  return out + ")";
}

bool satisfies_trigger(const Configuration& c, const Trigger& trigger) {
  return c.state == trigger.state && c.head == trigger.datum;
}

Rtm::Rtm(std::vector<std::string> states, std::vector<std::string> data, std::vector<ActionLabel> actions,
         std::vector<Rule> rules, std::string initial)
    : states_(std::move(states)),
      data_(std::move(data)),
      actions_(std::move(actions)),
      rules_(std::move(rules)),
      initial_(std::move(initial)) {
  if (std::find(data_.begin(), data_.end(), blank_symbol) == data_.end()) data_.insert(data_.begin(), blank_symbol);
  auto has = [](const auto& v, const auto& x) { return std::find(v.begin(), v.end(), x) != v.end(); };
  if (!has(states_, initial_)) throw std::invalid_argument("initial state '" + initial_ + "' is not declared");
  for (const auto& a : actions_)
    if (a.is_silent()) throw std::invalid_argument("'tau' is reserved and cannot be declared as an action");
  for (std::size_t k = 0; k < rules_.size(); ++k) {
    const Rule& r = rules_[k];
    for (const auto* s : {&r.from, &r.to})
      if (!has(states_, *s)) throw std::invalid_argument("undeclared state '" + *s + "'");
    for (const auto* d : {&r.read, &r.write})
      if (!has(data_, *d)) throw std::invalid_argument("undeclared datum '" + *d + "'");
    if (!r.action.is_silent() && !has(actions_, r.action))
      throw std::invalid_argument("undeclared action '" + to_string(r.action) + "'");
    by_trigger_[{r.from, r.read}].push_back(k);
  }
}

std::vector<const Rule*> Rtm::rules_for(const Trigger& trigger) const {
  std::vector<const Rule*> out;
  if (auto it = by_trigger_.find(trigger); it != by_trigger_.end())
    for (std::size_t k : it->second) out.push_back(&rules_[k]);
  return out;
}

bool Rtm::operator==(const Rtm& other) const {
  return states_ == other.states_ && data_ == other.data_ && actions_ == other.actions_ &&
         rules_ == other.rules_ && initial_ == other.initial_;
}

namespace {

std::vector<std::string> tokenize(std::string_view line, std::size_t lineno) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    if (line[i] == '"') {
      auto end = line.find('"', i + 1);
      if (end == std::string_view::npos)
        throw ParseError("unterminated quote at line " + std::to_string(lineno), lineno);
      out.emplace_back(line.substr(i + 1, end - i - 1));
      i = end + 1;
      continue;
    }
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string quote_if_needed(const std::string& s) {
  return s.find(' ') == std::string::npos ? s : "\"" + s + "\"";
}

}  // namespace

Rtm parse_rtm(std::string_view text) {
  std::vector<std::string> states, data;
  std::vector<ActionLabel> actions;
  std::vector<Rule> rules;
  std::vector<std::size_t> rule_lines;
  std::string initial;
  bool seen_states = false, seen_data = false, seen_actions = false, seen_initial = false;

  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) { return ParseError(msg + " at line " + std::to_string(lineno), lineno); };
  auto unique_list = [&](const std::vector<std::string>& toks) {
    std::vector<std::string> out(toks.begin() + 1, toks.end());
    std::set<std::string> seen;
    for (const auto& t : out)
      if (!seen.insert(t).second) throw fail("duplicate declaration '" + t + "'");
    return out;
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto toks = tokenize(line, lineno);
    if (toks.empty()) continue;
    const std::string& key = toks[0];
    if (key == "states:") {
      if (seen_states) throw fail("duplicate declaration 'states:'");
      seen_states = true;
      states = unique_list(toks);
    } else if (key == "data:") {
      if (seen_data) throw fail("duplicate declaration 'data:'");
      seen_data = true;
      data = unique_list(toks);
    } else if (key == "actions:") {
      if (seen_actions) throw fail("duplicate declaration 'actions:'");
      seen_actions = true;
      for (const auto& t : unique_list(toks)) {
        if (t == "tau") throw fail("'tau' is reserved");
        try {
          actions.push_back(parse_label(t));
        } catch (const std::invalid_argument& e) {
          throw fail(e.what());
        }
      }
    } else if (key == "initial:") {
      if (seen_initial) throw fail("duplicate declaration 'initial:'");
      if (toks.size() != 2) throw fail("expected one initial state");
      seen_initial = true;
      initial = toks[1];
    } else if (key == "rule:") {
      if (toks.size() != 8 || toks[4] != "/" || (toks[6] != "L" && toks[6] != "R"))
        throw fail("expected 'rule: s a d / e L|R t'");
      Rule r;
      r.from = toks[1];
      try {
        r.action = parse_label(toks[2]);
      } catch (const std::invalid_argument& e) {
        throw fail(e.what());
      }
      r.read = toks[3];
      r.write = toks[5];
      r.move = toks[6] == "L" ? Move::left : Move::right;
      r.to = toks[7];
      rules.push_back(std::move(r));
      rule_lines.push_back(lineno);
    } else {
      throw fail("unknown declaration '" + key + "'");
    }
  }
  if (!seen_initial) throw ParseError("missing 'initial:' declaration at line " + std::to_string(lineno), lineno);

  // Symbol validation with the offending rule's line.
  auto has = [](const auto& v, const auto& x) { return std::find(v.begin(), v.end(), x) != v.end(); };
  auto data_with_blank = data;
  if (!has(data_with_blank, blank_symbol)) data_with_blank.push_back(blank_symbol);
  for (std::size_t k = 0; k < rules.size(); ++k) {
    lineno = rule_lines[k];
    const Rule& r = rules[k];
    for (const auto* s : {&r.from, &r.to})
      if (!has(states, *s)) throw fail("undeclared state '" + *s + "'");
    for (const auto* d : {&r.read, &r.write})
      if (!has(data_with_blank, *d)) throw fail("undeclared datum '" + *d + "'");
    if (!r.action.is_silent() && !has(actions, r.action)) throw fail("undeclared action '" + to_string(r.action) + "'");
  }
  try {
    return Rtm(std::move(states), std::move(data), std::move(actions), std::move(rules), std::move(initial));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), 0);
  }
}

std::string emit_rtm(const Rtm& rtm) {
  std::ostringstream out;
  out << "states:";
  for (const auto& s : rtm.states()) out << ' ' << s;
  out << "\ninitial: " << rtm.initial() << "\ndata:";
  for (const auto& d : rtm.data()) out << ' ' << d;
  out << "\nactions:";
  for (const auto& a : rtm.actions()) out << ' ' << quote_if_needed(to_string(a));
  out << '\n';
  for (const auto& r : rtm.rules())
    out << "rule: " << r.from << ' ' << quote_if_needed(to_string(r.action)) << ' ' << r.read << " / " << r.write
        << ' ' << (r.move == Move::left ? 'L' : 'R') << ' ' << r.to << '\n';
  return out.str();
}

std::vector<std::pair<ActionLabel, Configuration>> step(const Rtm& rtm, const Configuration& c) {
  std::vector<std::pair<ActionLabel, Configuration>> out;
  for (const Rule* r : rtm.rules_for(c.trigger())) {
    Configuration next{r->to, c.left, r->write, c.right};
    if (r->move == Move::left) {
      next.right.insert(next.right.begin(), next.head);
      if (next.left.empty()) {
        next.head = blank_symbol;
      } else {
        next.head = next.left.back();
        next.left.pop_back();
      }
    } else {
      next.left.push_back(next.head);
      if (next.right.empty()) {
        next.head = blank_symbol;
      } else {
        next.head = next.right.front();
        next.right.erase(next.right.begin());
      }
    }
    next.normalize();
    out.emplace_back(r->action, std::move(next));
  }
  return out;
}

RtmExploration reachable_lts(const Rtm& rtm, std::size_t max_states) {
  if (max_states == 0) throw std::invalid_argument("max_states must be at least 1");
  RtmExploration result;
  std::map<Configuration, StateId> ids;
  std::vector<Transition> edges;
  std::deque<StateId> queue;
  auto intern = [&](const Configuration& c) -> std::optional<StateId> {
    if (auto it = ids.find(c); it != ids.end()) return it->second;
    if (result.configurations.size() >= max_states) return std::nullopt;
    auto id = static_cast<StateId>(result.configurations.size());
    ids.emplace(c, id);
    result.configurations.push_back(c);
    queue.push_back(id);
    return id;
  };
  intern(rtm.initial_configuration());
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop_front();
    for (auto& [label, next] : step(rtm, result.configurations[s])) {
      auto t = intern(next);
      if (!t) {
        result.complete = false;
        continue;
      }
      edges.push_back({s, label, *t});
    }
  }
  result.lts = Lts(result.configurations.size(), 0, std::move(edges));
  return result;
}

TriggerSet triggers(const Rtm& rtm) {
  TriggerSet out;
  for (const auto& s : rtm.states())
    for (const auto& d : rtm.data()) out.all.push_back({s, d});
  std::set<Trigger> used;
  for (const auto& r : rtm.rules()) used.insert({r.from, r.read});
  for (const auto& tr : out.all)
    if (used.count(tr)) out.used.push_back(tr);
  return out;
}

Rtm relabel_internal(const Rtm& rtm) {
  const ActionLabel marker = ActionLabel::internal();
  if (std::find(rtm.actions().begin(), rtm.actions().end(), marker) != rtm.actions().end())
    throw std::invalid_argument("action 'i' already declared");
  std::vector<ActionLabel> actions = rtm.actions();
  std::vector<Rule> rules = rtm.rules();
  bool any = false;
  for (auto& r : rules)
    if (r.action.is_silent()) {
      r.action = marker;
      any = true;
    }
  if (any) actions.push_back(marker);
  return Rtm(rtm.states(), rtm.data(), std::move(actions), std::move(rules), rtm.initial());
}

}  // namespace rtmpi
