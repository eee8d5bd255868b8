#include "rtmpi/lts.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <sstream>

namespace rtmpi {

namespace {

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
}

bool is_name(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), is_name_char);
}

}  // namespace

std::string to_string(const ActionLabel& label) {
  switch (label.kind) {
    case ActionLabel::Kind::silent:
      return "tau";
    case ActionLabel::Kind::internal_marker:
      return "i";
    case ActionLabel::Kind::observable:
      break;
  }
  std::string out = label.polarity == Polarity::output ? "'" : "";
  out += label.channel;
  if (label.payload) {
    out += ' ';
    out += *label.payload;
  }
  return out;
}

ActionLabel parse_label(std::string_view text) {
  if (text == "tau") return ActionLabel::silent();
  if (text == "i") return ActionLabel::internal();
  ActionLabel label;
  label.kind = ActionLabel::Kind::observable;
  if (!text.empty() && text.front() == '\'') {
    label.polarity = Polarity::output;
    text.remove_prefix(1);
  }
  auto space = text.find(' ');
  std::string_view chan = text.substr(0, space);
  // `<div>` is the divergence marker of the dpbb reduction; it round-trips.
  if (!is_name(chan) && chan != "<div>")
    throw std::invalid_argument("malformed label '" + std::string(text) + "'");
  if (chan == "i") throw std::invalid_argument("channel name 'i' is reserved");
  if (chan == "tau") throw std::invalid_argument("channel name 'tau' is reserved");
  label.channel = std::string(chan);
  if (space != std::string_view::npos) {
    std::string_view payload = text.substr(space + 1);
    if (!is_name(payload)) throw std::invalid_argument("malformed payload in label '" + std::string(text) + "'");
    label.payload = std::string(payload);
  }
  return label;
}

Lts::Lts(std::size_t num_states, StateId initial, std::vector<Transition> transitions)
    : num_states_(num_states), initial_(initial), transitions_(std::move(transitions)) {
  if (num_states_ == 0) throw std::invalid_argument("an LTS needs at least one state");
  if (initial_ >= num_states_) throw std::invalid_argument("initial state out of range");
  for (const auto& t : transitions_)
    if (t.source >= num_states_ || t.target >= num_states_)
      throw std::invalid_argument("transition endpoint out of range");
  std::sort(transitions_.begin(), transitions_.end());
  transitions_.erase(std::unique(transitions_.begin(), transitions_.end()), transitions_.end());
  offsets_.assign(num_states_ + 1, 0);
  for (const auto& t : transitions_) ++offsets_[t.source + 1];
  for (std::size_t s = 0; s < num_states_; ++s) offsets_[s + 1] += offsets_[s];
}

std::pair<const Transition*, const Transition*> Lts::outgoing(StateId s) const {
  const Transition* base = transitions_.data();
  return {base + offsets_[s], base + offsets_[s + 1]};
}

Lts parse_aut(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) -> ParseError {
    return ParseError(msg + " at line " + std::to_string(lineno), lineno);
  };

  std::size_t init = 0, m = 0, n = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    char open = 0, close = 0, c1 = 0, c2 = 0;
    std::string des;
    std::istringstream hs(line);
    hs >> des >> open >> init >> c1 >> m >> c2 >> n >> close;
    if (!hs || des != "des" || open != '(' || c1 != ',' || c2 != ',' || close != ')')
      throw fail("malformed header");
    if (n == 0) throw fail("malformed header: zero states");
    if (init >= n) throw fail("initial state out of range");
    have_header = true;
    break;
  }
  if (!have_header) throw ParseError("malformed header: empty input at line 1", 1);

  std::vector<Transition> edges;
  edges.reserve(m);
  std::size_t seen = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto q1 = line.find('"');
    auto q2 = line.rfind('"');
    if (q1 == std::string::npos || q2 == q1) throw fail("malformed transition");
    std::string head = line.substr(0, q1);
    std::string tail = line.substr(q2 + 1);
    std::string text = line.substr(q1 + 1, q2 - q1 - 1);
    long src = -1, dst = -1;
    char open = 0, comma = 0;
    std::istringstream hs(head);
    hs >> open >> src >> comma;
    if (!hs || open != '(' || comma != ',') throw fail("malformed transition");
    std::istringstream ts(tail);
    char close = 0;
    ts >> comma >> dst >> close;
    if (!ts || comma != ',' || close != ')') throw fail("malformed transition");
    if (src < 0 || dst < 0 || static_cast<std::size_t>(src) >= n || static_cast<std::size_t>(dst) >= n)
      throw fail("state index out of range");
    ActionLabel label;
    try {
      label = parse_label(text);
    } catch (const std::invalid_argument& e) {
      throw fail(e.what());
    }
    edges.push_back({static_cast<StateId>(src), std::move(label), static_cast<StateId>(dst)});
    ++seen;
  }
  if (seen != m)
    throw ParseError("transition count mismatch: header says " + std::to_string(m) + ", found " +
                         std::to_string(seen) + " at line " + std::to_string(lineno),
                     lineno);
  return Lts(n, static_cast<StateId>(init), std::move(edges));
}

Lts parse_aut_string(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_aut(in);
}

Lts canonical_renumbering(const Lts& lts) {
  const std::size_t n = lts.size();
  constexpr StateId unset = static_cast<StateId>(-1);
  std::vector<StateId> order(n, unset);
  StateId next = 0;
  std::deque<StateId> queue;
  auto visit = [&](StateId s) {
    if (order[s] != unset) return;
    order[s] = next++;
    queue.push_back(s);
  };
  auto drain = [&] {
    while (!queue.empty()) {
      StateId s = queue.front();
      queue.pop_front();
      auto [b, e] = lts.outgoing(s);
      for (auto it = b; it != e; ++it) visit(it->target);
    }
  };
  visit(lts.initial());
  drain();
  for (StateId s = 0; s < n; ++s) {
    visit(s);
    drain();
  }
  std::vector<Transition> edges;
  edges.reserve(lts.transitions().size());
  for (const auto& t : lts.transitions()) edges.push_back({order[t.source], t.label, order[t.target]});
  return Lts(n, order[lts.initial()], std::move(edges));
}

void emit_aut(std::ostream& out, const Lts& lts) {
  Lts canon = canonical_renumbering(lts);
  out << "des (" << canon.initial() << "," << canon.transitions().size() << "," << canon.size() << ")\n";
  for (const auto& t : canon.transitions())
    out << "(" << t.source << ",\"" << to_string(t.label) << "\"," << t.target << ")\n";
}

std::string emit_aut_string(const Lts& lts) {
  std::ostringstream out;
  emit_aut(out, lts);
  return out.str();
}

Lts relabel(const Lts& lts, const ActionLabel& from, const ActionLabel& to) {
  std::vector<Transition> edges = lts.transitions();
  for (auto& t : edges)
    if (t.label == from) t.label = to;
  return Lts(lts.size(), lts.initial(), std::move(edges));
}

std::vector<StateId> mark_divergence(const Lts& lts) {
  // A state diverges iff it reaches, by silent steps, a state on a silent
  // cycle. Strip silent-sink states repeatedly; whatever survives diverges.
  const std::size_t n = lts.size();
  std::vector<std::size_t> silent_out(n, 0);
  std::vector<std::vector<StateId>> silent_pred(n);
  for (const auto& t : lts.transitions()) {
    if (!t.label.is_silent()) continue;
    ++silent_out[t.source];
    silent_pred[t.target].push_back(t.source);
  }
  std::vector<bool> removed(n, false);
  std::vector<StateId> work;
  for (StateId s = 0; s < n; ++s)
    if (silent_out[s] == 0) work.push_back(s);
  while (!work.empty()) {
    StateId s = work.back();
    work.pop_back();
    if (removed[s]) continue;
    removed[s] = true;
    for (StateId p : silent_pred[s])
      if (--silent_out[p] == 0) work.push_back(p);
  }
  std::vector<StateId> result;
  for (StateId s = 0; s < n; ++s)
    if (!removed[s]) result.push_back(s);
  return result;
}

}  // namespace rtmpi
