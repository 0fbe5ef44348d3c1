#include "certdag/oracle/session.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace certdag::oracle {

using nlohmann::json;
using propagation::PropagationReport;

std::string_view to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::Created: return "CREATED";
    case SessionStatus::AwaitingAnswer: return "AWAITING_ANSWER";
    case SessionStatus::Propagating: return "PROPAGATING";
    case SessionStatus::Done: return "DONE";
  }
  return "?";
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string arrow(const std::string& a, const std::string& b) { return a + "->" + b; }

bool can_commit(const PartialDag& dag, Pair p, Direction d) {
  return dag.is_open(p) && dag.allowed(p, d) && !dag.would_create_cycle(parent_of(p, d), child_of(p, d));
}

Action commit_action(Direction d) { return d == Direction::Fwd ? Action::CommitFwd : Action::CommitBwd; }

// Appends `e` and applies it, so the live graph is the fold of the trace.
void emit_to(PartialDag& dag, Trace& trace, TraceEvent e) {
  apply_event(dag, e);
  trace.append(std::move(e));
}

void drop_forbidden(PartialDag& dag, Trace& trace, int round, Mechanism m) {
  for (Pair p : dag.open_pairs())
    if (!dag.allowed(p, Direction::Fwd) && !dag.allowed(p, Direction::Bwd))
      emit_to(dag, trace, {round, m, p, Action::Drop, "both orientations ruled out by oracle answers", 0.0});
}

json query_detail(const OracleQuery& q) {
  json j{{"kind", to_string(q.kind)}, {"info_value", q.info_value}, {"question", q.question_text}};
  if (q.node) j["node"] = *q.node;
  if (q.k) j["k"] = *q.k;
  return j;
}

json answer_detail(const OracleQuery& q, const OracleAnswer& a) {
  json j = a.to_json();
  if (q.node) j["node"] = *q.node;
  return j;
}

// Commits node -> c for each listed child with an open candidate pair. Returns messages
// for children that could not be committed.
std::vector<std::string> commit_children(PartialDag& dag, Trace& trace, int round, int node,
                                         const std::vector<int>& children, const std::vector<std::string>& names) {
  std::vector<std::string> problems;
  for (int c : children) {
    const Pair p = Pair::of(node, c);
    const Direction d = direction_from(p, node);
    const std::string label = arrow(names[static_cast<std::size_t>(node)], names[static_cast<std::size_t>(c)]);
    if (can_commit(dag, p, d)) {
      emit_to(dag, trace, {round, Mechanism::M14, p, commit_action(d), "node-children answer " + label, 0.0});
    } else if (dag.state(p) == PairState::Committed && dag.direction(p) != d) {
      problems.push_back("INCONSISTENT_ANSWER: " + label + " contradicts the committed opposite edge");
    } else if (dag.is_open(p)) {
      problems.push_back("INCONSISTENT_ANSWER: " + label + " would close a directed cycle or was ruled out");
    }
  }
  return problems;
}

std::vector<std::string> default_names(int n) {
  std::vector<std::string> out;
  for (int v = 0; v < n; ++v) out.push_back("v" + std::to_string(v));
  return out;
}

}  // namespace

Session::Session(Dataset data, Config config, QuestionTemplates templates, std::optional<int> known_k)
    : data_(std::move(data)), config_(std::move(config)), templates_(std::move(templates)), known_k_(known_k) {
  config_.validate();
  for (const auto& name : config_.circular_variables) {
    const int v = data_.index_of(name);
    if (v < 0) throw CertdagError("CONFIG_INVALID", "circular variable " + name + " is not a column");
    data_.flag_circular(v);
  }
  ctx_ = std::make_unique<stats::StatsContext>(data_, config_);
  dag_ = PartialDag(data_.vars());
  for (int i = 0; i < data_.vars(); ++i)
    for (int j = i + 1; j < data_.vars(); ++j) records_[Pair{i, j}].pair = Pair{i, j};
}

void Session::emit(TraceEvent e) { emit_to(dag_, trace_, std::move(e)); }

void Session::emit_all(std::vector<TraceEvent> events, int round) {
  for (auto& e : events) {
    e.round = round;
    trace_.append(std::move(e));
  }
}

void Session::note_resolutions(const PropagationReport& r) {
  for (const auto& c : r.new_commits)
    records_[c.pair].provenance = c.rule == propagation::Rule::Reaudit ? Mechanism::M7 : Mechanism::M6;
  for (Pair p : r.drops) records_[p].provenance = Mechanism::M8;
}

PropagationReport Session::run_auto_resolve(int round) {
  auto r = propagation::auto_resolve(dag_, *ctx_, config_.cascade_enabled);
  note_resolutions(r);
  emit_all(r.events, round);
  return r;
}

void Session::audit() {
  if (status_ != SessionStatus::Created) return;
  round_ = 1;
  const auto& names = data_.names();
  if (config_.cascade_enabled && data_.vars() >= 2) {
    skeleton_ = skeleton::build_skeleton(*ctx_);
    for (auto& [p, rec] : records_) {
      if (skeleton_.contains(p)) continue;
      emit({1, Mechanism::M1, p, Action::Drop,
            "marginal HSIC p=" + fmt(skeleton_.marginal_p.at(p)) + " not retained at FDR level " + fmt(config_.fdr_level),
            0.0});
      rec.provenance = Mechanism::M1;
    }
    const auto mediated = skeleton::mediator_search(skeleton_, *ctx_);
    for (Pair p : skeleton_.pairs) {
      auto it = mediated.find(p);
      if (it == mediated.end()) continue;
      std::string by;
      for (int z : it->second.mediated_by) by += (by.empty() ? "" : ",") + names[static_cast<std::size_t>(z)];
      emit({1, Mechanism::M2, p, Action::Drop,
            "mediated by {" + by + "} tier " + std::to_string(it->second.tier) + " p=" + fmt(it->second.p_conditional),
            0.0});
      auto& rec = records_[p];
      rec.certificate = CertificateCode::ResolvedMediated;
      rec.provenance = Mechanism::M2;
      rec.evidence = {{"mediated_by", it->second.mediated_by}, {"tier", it->second.tier},
                      {"p_conditional", it->second.p_conditional}};
    }
    for (Pair p : skeleton_.pairs) {
      if (!dag_.is_open(p)) continue;
      auto v = cascade::run_cascade(p, *ctx_);
      auto& rec = records_[p];
      rec.evidence = v.to_json();
      if (v.final && !can_commit(dag_, p, *v.final)) {
        // An earlier commit in this round already implies the opposite ordering.
        v.final.reset();
        v.certificate = CertificateCode::ImpossibleAmbiguous;
        rec.evidence["cycle_conflict"] = true;
      }
      rec.certificate = v.certificate;
      const std::string detail = rec.evidence.dump();
      if (v.final) {
        emit({1, mechanism_of(*v.committed_by), p, commit_action(*v.final), detail, 0.0});
        rec.provenance = mechanism_of(*v.committed_by);
      } else if (v.demoted && v.committed_by) {
        const cascade::TierDecision* d0 = v.decision(*v.committed_by);
        auto dir = d0 ? cascade::direction_of(d0->outcome) : std::nullopt;
        if (dir && can_commit(dag_, p, *dir)) {
          emit({1, mechanism_of(*v.committed_by), p, commit_action(*dir), detail, 0.0});
          emit({1, Mechanism::M5, p, Action::Demote,
                std::string(to_string(*v.committed_by)) + " contradicted by " + std::string(to_string(*v.demoted_by)),
                0.0});
        } else {
          emit({1, Mechanism::M10, p, Action::Abstain, detail, 0.0});
        }
      } else {
        const bool classical = v.certificate == CertificateCode::ImpossibleR1 ||
                               v.certificate == CertificateCode::ImpossibleLatentLikely ||
                               v.certificate == CertificateCode::ImpossibleRegressorInconsistent ||
                               v.certificate == CertificateCode::ImpossibleNonlinearWeak ||
                               v.certificate == CertificateCode::ImpossibleHocAmbiguous ||
                               v.certificate == CertificateCode::ImpossibleAmbiguous;
        emit({1, classical ? Mechanism::M9 : Mechanism::M10, p, Action::Abstain, detail, 0.0});
      }
      verdicts_.emplace(p, std::move(v));
    }
  }
  round_ = 2;
  run_auto_resolve(2);
  status_ = SessionStatus::AwaitingAnswer;
}

double Session::info_value(Pair p) {
  std::vector<double> counts;
  for (Direction d : {Direction::Fwd, Direction::Bwd}) {
    if (!can_commit(dag_, p, d)) continue;
    PartialDag copy = dag_;
    copy.commit(p, d);
    counts.push_back(static_cast<double>(propagation::auto_resolve(copy, *ctx_, config_.cascade_enabled).resolved()));
  }
  if (counts.empty()) return 0.0;
  if (config_.info_value_strategy == InfoValueStrategy::Expected)
    return std::accumulate(counts.begin(), counts.end(), 0.0) / static_cast<double>(counts.size());
  return *std::min_element(counts.begin(), counts.end());
}

std::map<std::string, std::string> Session::question_vars(Pair p) const {
  const auto& names = data_.names();
  const std::string x = names[static_cast<std::size_t>(p.i)], y = names[static_cast<std::size_t>(p.j)];
  std::map<std::string, std::string> v{{"x", x}, {"y", y}, {"alpha", fmt(config_.alpha_residual)}};
  if (auto it = skeleton_.marginal_p.find(p); it != skeleton_.marginal_p.end()) v["marginal_p"] = fmt(it->second);
  auto it = verdicts_.find(p);
  if (it == verdicts_.end()) return v;
  const auto& ev = it->second.evidence;
  const std::string fwd = arrow(x, y), bwd = arrow(y, x);
  v["max_p"] = fmt(std::max(ev.nl_p_fwd, ev.nl_p_bwd));
  v["lin_dir"] = ev.lin_p_fwd >= ev.lin_p_bwd ? fwd : bwd;
  v["nl_dir"] = ev.nl_p_fwd >= ev.nl_p_bwd ? fwd : bwd;
  v["hoc"] = fmt(ev.hoc);
  v["hoc_dir"] = ev.hoc > 0 ? fwd : bwd;
  if (it->second.committed_by)
    if (const auto* d = it->second.decision(*it->second.committed_by))
      if (auto dir = cascade::direction_of(d->outcome)) v["l0_dir"] = *dir == Direction::Fwd ? fwd : bwd;
  if (it->second.demoted_by) v["high_tier"] = to_string(*it->second.demoted_by);
  std::string circ;
  if (data_.meta(p.i).flagged_circular) circ = x;
  if (data_.meta(p.j).flagged_circular) circ += (circ.empty() ? "" : " and ") + y;
  if (!circ.empty()) v["circular"] = circ;
  return v;
}

OracleQuery Session::edge_query(Pair p, Mechanism m, double value) {
  OracleQuery q;
  q.kind = QueryKind::PerEdge;
  q.edge = p;
  q.mechanism = m;
  q.info_value = value;
  auto it = records_.find(p);
  if (it != records_.end() && it->second.certificate && is_impossible(*it->second.certificate))
    q.certificate = it->second.certificate;
  std::string key = m == Mechanism::M15 ? "RECOVERY" : q.certificate ? std::string(to_string(*q.certificate)) : "PER_EDGE";
  q.question_text = templates_.render(key, question_vars(p));
  return q;
}

std::optional<OracleQuery> Session::best_edge_query() {
  std::optional<Pair> best;
  double best_value = -1.0;
  for (Pair p : dag_.open_pairs()) {
    if (skipped_.count(p)) continue;
    const double v = info_value(p);
    if (v > best_value) best_value = v, best = p;
  }
  if (!best) return std::nullopt;
  return edge_query(*best, Mechanism::M11, best_value);
}

std::optional<OracleQuery> Session::children_query(bool hubs_only) {
  auto candidates = [&](int v) {
    int c = 0;
    for (int u = 0; u < dag_.vertices(); ++u) {
      if (u == v) continue;
      const Pair p = Pair::of(v, u);
      if (dag_.is_open(p) && !skipped_.count(p) && dag_.allowed(p, direction_from(p, v))) ++c;
    }
    return c;
  };
  std::optional<int> pick;
  if (hubs_only) {
    for (int h : hubs_)
      if (!children_asked_.count(h) && candidates(h) > 0) {
        pick = h;
        break;
      }
  } else {
    int best = 0;
    for (int v = 0; v < dag_.vertices(); ++v) {
      if (children_asked_.count(v)) continue;
      const int c = candidates(v);
      if (c > best) best = c, pick = v;
    }
  }
  if (!pick) return std::nullopt;
  OracleQuery q;
  q.kind = QueryKind::NodeChildren;
  q.node = *pick;
  q.mechanism = Mechanism::M14;
  q.info_value = candidates(*pick);
  q.question_text = templates_.render("NODE_CHILDREN", {{"node", data_.name(*pick)}});
  return q;
}

std::optional<OracleQuery> Session::recovery_query() {
  std::vector<Pair> cands;
  for (const auto& [p, rec] : records_) {
    if (dag_.state(p) != PairState::Absent || recovery_asked_.count(p)) continue;
    if (config_.recovery_filter_marginal) {
      auto it = skeleton_.marginal_p.find(p);
      if (it != skeleton_.marginal_p.end() && !(it->second < config_.recovery_marginal_p)) continue;
    }
    if (config_.recovery_filter_reachability && (dag_.has_directed_path(p.i, p.j) || dag_.has_directed_path(p.j, p.i)))
      continue;
    cands.push_back(p);
  }
  if (cands.empty()) return std::nullopt;
  if (config_.recovery_filter_degree) {
    auto degree = [&](int v) { return dag_.parents(v).size() + dag_.children(v).size(); };
    std::stable_sort(cands.begin(), cands.end(),
                     [&](Pair a, Pair b) { return degree(a.i) + degree(a.j) > degree(b.i) + degree(b.j); });
  }
  return edge_query(cands.front(), Mechanism::M15, 0.0);
}

std::optional<OracleQuery> Session::choose_query() {
  const bool hub_mode = config_.oracle_mode != OracleMode::PerEdge;
  if (hub_mode && !hubs_asked_ && !dag_.open_pairs().empty()) {
    const int k = known_k_ ? *known_k_ : config_.metahub_k;
    if (!known_k_ && k <= 0) throw CertdagError("CONFIG_INVALID", "meta-hub mode needs metahub_k or a ground-truth K");
    OracleQuery q;
    q.kind = QueryKind::MetaHub;
    q.k = std::min(k, data_.vars());
    q.mechanism = Mechanism::M13;
    q.question_text = templates_.render("META_HUB", {{"k", std::to_string(*q.k)}});
    return q;
  }
  if (hub_mode)
    if (auto q = children_query(true)) return q;
  if (config_.oracle_mode == OracleMode::MetahubChildren)
    if (auto q = children_query(false)) return q;
  if (auto q = best_edge_query()) return q;
  if (config_.recovery_enabled) return recovery_query();
  return std::nullopt;
}

std::optional<OracleQuery> Session::next_query() {
  audit();
  if (pending_) return pending_;
  if (status_ == SessionStatus::Done) return std::nullopt;
  pending_ = choose_query();
  status_ = pending_ ? SessionStatus::AwaitingAnswer : SessionStatus::Done;
  return pending_;
}

AnswerOutcome Session::answer(const OracleAnswer& a) {
  if (!pending_) throw CertdagError("NO_PENDING_QUERY", "no question is pending");
  const OracleQuery q = *pending_;
  check_answer(q, a, data_.vars());
  status_ = SessionStatus::Propagating;
  ++round_;
  AnswerOutcome out;
  emit({round_, q.mechanism, q.edge, Action::Query, query_detail(q).dump(), 1.0});
  emit({round_, Mechanism::Oracle, q.edge, Action::Answer, answer_detail(q, a).dump(), 0.0});
  const auto& names = data_.names();

  switch (q.kind) {
    case QueryKind::PerEdge: {
      const Pair p = *q.edge;
      if (q.mechanism == Mechanism::M15) recovery_asked_.insert(p);
      const std::string x = names[static_cast<std::size_t>(p.i)], y = names[static_cast<std::size_t>(p.j)];
      if (a.edge == EdgeAnswer::Fwd || a.edge == EdgeAnswer::Bwd) {
        const Direction d = a.edge == EdgeAnswer::Fwd ? Direction::Fwd : Direction::Bwd;
        const std::string label = d == Direction::Fwd ? arrow(x, y) : arrow(y, x);
        if (can_commit(dag_, p, d)) {
          emit({round_, Mechanism::Oracle, p, commit_action(d), "oracle " + label, 0.0});
          records_[p].provenance = Mechanism::Oracle;
        } else {
          out.inconsistent = true;
          out.message = "INCONSISTENT_ANSWER: " + label + " would close a directed cycle with committed edges";
          emit({round_, Mechanism::Oracle, p, Action::Abstain, out.message, 0.0});
          skipped_.insert(p);
        }
      } else if (dag_.is_open(p)) {
        emit({round_, Mechanism::Oracle, p, Action::Drop,
              a.edge == EdgeAnswer::Absent ? "oracle ABSENT" : "oracle UNKNOWN, treated as ABSENT", 0.0});
        records_[p].provenance = Mechanism::Oracle;
      }
      break;
    }
    case QueryKind::MetaHub:
      hubs_asked_ = true;
      hubs_ = a.nodes;
      drop_forbidden(dag_, trace_, round_, Mechanism::M13);
      break;
    case QueryKind::NodeChildren: {
      children_asked_.insert(*q.node);
      auto problems = commit_children(dag_, trace_, round_, *q.node, a.nodes, names);
      for (int c : a.nodes) {
        const Pair p = Pair::of(*q.node, c);
        if (dag_.has_edge(*q.node, c)) records_[p].provenance = Mechanism::M14;
      }
      if (!problems.empty()) {
        out.inconsistent = true;
        for (const auto& m : problems) {
          out.message += (out.message.empty() ? "" : "; ") + m;
          emit({round_, Mechanism::Oracle, std::nullopt, Action::Abstain, m, 0.0});
        }
      }
      drop_forbidden(dag_, trace_, round_, Mechanism::M14);
      break;
    }
  }
  for (Pair p : dag_.dropped_pairs())
    if (!records_[p].provenance) records_[p].provenance = q.mechanism;

  out.report = run_auto_resolve(round_);
  history_.push_back({round_, q, a, out.report.resolved(), out.inconsistent});
  pending_.reset();
  status_ = SessionStatus::AwaitingAnswer;
  return out;
}

json Session::dag_json() const {
  const auto& names = data_.names();
  auto name = [&](int v) { return names[static_cast<std::size_t>(v)]; };
  json committed = json::array(), open = json::array(), dropped = json::array();
  for (auto [a, b] : dag_.committed_edges()) committed.push_back({name(a), name(b)});
  for (Pair p : dag_.open_pairs()) open.push_back({name(p.i), name(p.j)});
  for (Pair p : dag_.dropped_pairs()) dropped.push_back({name(p.i), name(p.j)});
  return {{"vertices", names}, {"committed", committed}, {"open", open}, {"dropped", dropped}};
}

json Session::report() const {
  const auto& names = data_.names();
  json pairs = json::array(), residual = json::array();
  auto* self = const_cast<Session*>(this);
  for (const auto& [p, rec] : records_) {
    json r{{"pair", {names[static_cast<std::size_t>(p.i)], names[static_cast<std::size_t>(p.j)]}},
           {"certificate", rec.certificate ? json(to_string(*rec.certificate)) : json("PENDING")},
           {"provenance", rec.provenance ? json(to_string(*rec.provenance)) : json(nullptr)}};
    switch (dag_.state(p)) {
      case PairState::Committed:
        r["state"] = to_string(*dag_.direction(p));
        break;
      case PairState::Open: r["state"] = "OPEN"; break;
      case PairState::Dropped: r["state"] = "DROPPED"; break;
      case PairState::Absent: r["state"] = "ABSENT"; break;
    }
    pairs.push_back(r);
    if (dag_.is_open(p)) {
      auto q = self->edge_query(p, Mechanism::M11, 0.0);
      residual.push_back({{"pair", r["pair"]},
                          {"certificate", q.certificate ? json(to_string(*q.certificate)) : json("PENDING")},
                          {"question", q.question_text}});
    }
  }
  return {{"dag", dag_json()},
          {"committed", dag_.count(PairState::Committed)},
          {"open", dag_.count(PairState::Open)},
          {"dropped", dag_.count(PairState::Dropped)},
          {"skeleton_pairs", skeleton_.pairs.size()},
          {"interactions", interactions()},
          {"residual", residual},
          {"pairs", pairs}};
}

RunResult run_iterative(const Dataset& data, const Config& config, OracleBackend& backend,
                        const QuestionTemplates& templates) {
  Session s(data, config, templates, backend.known_k());
  while (auto q = s.next_query()) s.answer(backend.answer(*q));
  return {s.dag(), s.trace(), s.interactions(), s.history()};
}

RunResult run_pure_metahub(int vertices, OracleBackend& backend, const std::optional<std::vector<DirectedEdge>>& truth,
                           const std::vector<std::string>& names_in) {
  const auto names = names_in.empty() ? default_names(vertices) : names_in;
  const auto& templates = QuestionTemplates::defaults();
  auto k = backend.known_k();
  if (!k) throw CertdagError("CONFIG_INVALID", "pure meta-hub protocol needs the backend to supply K");
  RunResult r{PartialDag(vertices), {}, 0, {}};
  int round = 1;

  OracleQuery hub_q;
  hub_q.kind = QueryKind::MetaHub;
  hub_q.k = std::min(*k, vertices);
  hub_q.mechanism = Mechanism::M13;
  hub_q.question_text = templates.render("META_HUB", {{"k", std::to_string(*hub_q.k)}});
  const OracleAnswer hubs = backend.answer(hub_q);
  check_answer(hub_q, hubs, vertices);
  emit_to(r.dag, r.trace, {round, Mechanism::M13, std::nullopt, Action::Query, query_detail(hub_q).dump(), 1.0});
  emit_to(r.dag, r.trace, {round, Mechanism::Oracle, std::nullopt, Action::Answer, answer_detail(hub_q, hubs).dump(), 0.0});
  drop_forbidden(r.dag, r.trace, round, Mechanism::M13);
  r.history.push_back({round, hub_q, hubs, 0, false});

  for (int h : hubs.nodes) {
    ++round;
    OracleQuery q;
    q.kind = QueryKind::NodeChildren;
    q.node = h;
    q.mechanism = Mechanism::M14;
    q.question_text = templates.render("NODE_CHILDREN", {{"node", names[static_cast<std::size_t>(h)]}});
    const OracleAnswer a = backend.answer(q);
    check_answer(q, a, vertices);
    emit_to(r.dag, r.trace, {round, Mechanism::M14, std::nullopt, Action::Query, query_detail(q).dump(), 1.0});
    emit_to(r.dag, r.trace, {round, Mechanism::Oracle, std::nullopt, Action::Answer, answer_detail(q, a).dump(), 0.0});
    auto problems = commit_children(r.dag, r.trace, round, h, a.nodes, names);
    for (const auto& m : problems) emit_to(r.dag, r.trace, {round, Mechanism::Oracle, std::nullopt, Action::Abstain, m, 0.0});
    drop_forbidden(r.dag, r.trace, round, Mechanism::M14);
    r.history.push_back({round, q, a, 0, !problems.empty()});
  }
  r.interactions = static_cast<int>(r.history.size());
  if (truth)
    for (auto [a, b] : *truth)
      if (!r.dag.has_edge(a, b))
        throw CertdagError("IMPERFECT_ORACLE", "ground-truth edge " + arrow(names[static_cast<std::size_t>(a)],
                                                                            names[static_cast<std::size_t>(b)]) +
                                                   " was not recovered");
  return r;
}

ScriptedBackend script_from_trace(const Trace& trace) {
  std::vector<ScriptedBackend::Entry> entries;
  std::optional<int> k;
  const auto& ev = trace.events();
  for (std::size_t n = 0; n < ev.size(); ++n) {
    if (ev[n].action != Action::Query) continue;
    if (n + 1 >= ev.size() || ev[n + 1].action != Action::Answer)
      throw CertdagError("TRACE_MISMATCH", "query without an answer at event " + std::to_string(n));
    auto qj = json::parse(ev[n].detail, nullptr, false);
    auto aj = json::parse(ev[n + 1].detail, nullptr, false);
    if (qj.is_discarded() || aj.is_discarded()) throw CertdagError("TRACE_MISMATCH", "unreadable oracle event");
    ScriptedBackend::Entry e;
    auto kind = query_kind_from_string(qj.value("kind", std::string()));
    if (!kind) throw CertdagError("TRACE_MISMATCH", "unknown query kind in trace");
    e.query.kind = *kind;
    e.query.edge = ev[n].edge;
    if (qj.contains("node")) e.query.node = qj["node"].get<int>();
    if (qj.contains("k") && !k) k = qj["k"].get<int>();
    e.answer = OracleAnswer::from_json(aj);
    entries.push_back(std::move(e));
  }
  return ScriptedBackend(std::move(entries), k);
}

PartialDag replay(const Trace& trace, const Dataset& data, const Config& config, const QuestionTemplates& templates) {
  auto script = script_from_trace(trace);
  const auto& ev = trace.events();
  const bool pure = !ev.empty() && ev.front().round == 1 && ev.front().action == Action::Query;
  RunResult r;
  try {
    r = pure ? run_pure_metahub(data.vars(), script, std::nullopt, data.names())
             : run_iterative(data, config, script, templates);
  } catch (const CertdagError& e) {
    if (e.code() == "SCRIPT_MISMATCH") throw CertdagError("TRACE_MISMATCH", e.what());
    throw;
  }
  const auto& got = r.trace.events();
  for (std::size_t n = 0; n < std::min(got.size(), ev.size()); ++n) {
    if (got[n] == ev[n]) continue;
    Trace a, b;
    a.append(ev[n]);
    b.append(got[n]);
    throw CertdagError("TRACE_MISMATCH", "event " + std::to_string(n) + " diverges: recorded " + a.to_csv() +
                                             " replayed " + b.to_csv());
  }
  if (got.size() != ev.size())
    throw CertdagError("TRACE_MISMATCH", "replay produced " + std::to_string(got.size()) + " events, trace has " +
                                             std::to_string(ev.size()));
  if (!(fold_trace(ev, data.vars()) == r.dag)) throw CertdagError("TRACE_MISMATCH", "folded trace differs from replay");
  return r.dag;
}

}  // namespace certdag::oracle
