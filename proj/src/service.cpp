#include "rvpipe/service.hpp"

#include <random>

#include <fmt/format.h>

#include "rvpipe/examples.hpp"

namespace rvpipe {

using wire::json;

namespace {

std::optional<uint64_t> count_arg(const json& body) {
  if (!body.is_object() || !body.contains("n")) return 1;
  const json& n = body["n"];
  if (!n.is_number_integer() || n.get<int64_t>() < 1) return std::nullopt;
  return n.get<uint64_t>();
}

Response unknown_session(std::string_view id) {
  return error_response(404, "unknown-session", fmt::format("no session '{}'", id));
}

}  // namespace

Response error_response(int status, std::string_view code, std::string_view message) {
  return {status, json{{"error", {{"code", code}, {"message", message}}}}};
}

SessionService::SessionService(ServiceConfig config, Clock clock)
    : config_(config), clock_(std::move(clock)), id_salt_(std::random_device{}()) {}

std::string SessionService::new_id() {
  std::mt19937_64 rng(id_salt_ ^ (++id_counter_ * 0x9E3779B97F4A7C15ull));
  return fmt::format("{:016x}{:08x}", rng(), static_cast<uint32_t>(id_counter_));
}

size_t SessionService::session_count() const {
  std::lock_guard lk(mu_);
  return sessions_.size();
}

size_t SessionService::expire_idle() {
  const auto now = clock_();
  std::lock_guard lk(mu_);
  size_t n = 0;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    if (now - it->second->touched >= config_.ttl) {
      it = sessions_.erase(it);
      ++n;
    } else {
      ++it;
    }
  }
  return n;
}

std::shared_ptr<SessionService::Session> SessionService::find(std::string_view id) {
  expire_idle();
  std::lock_guard lk(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return nullptr;
  it->second->touched = clock_();
  return it->second;
}

std::optional<Response> SessionService::parse_options(const json& body, SimOptions& opts) const {
  if (body.is_object() && body.contains("options")) {
    const json& o = body["options"];
    if (!o.is_object()) return error_response(400, "bad-request", "options must be an object");
    if (o.contains("forwarding")) {
      if (!o["forwarding"].is_boolean()) return error_response(400, "bad-request", "options.forwarding must be a boolean");
      opts.forwarding = o["forwarding"].get<bool>();
    }
    if (o.contains("max_cycles")) {
      if (!o["max_cycles"].is_number_integer() || o["max_cycles"].get<int64_t>() < 1)
        return error_response(400, "bad-request", "options.max_cycles must be a positive integer");
      opts.max_cycles = o["max_cycles"].get<uint64_t>();
    }
  }
  if (config_.max_cycles_override) opts.max_cycles = std::min(opts.max_cycles, *config_.max_cycles_override);
  return std::nullopt;
}

json SessionService::payload(const Session& s, uint64_t prev_cycle) const {
  json j = wire::state_payload(s.id, *s.log, prev_cycle, s.high_water);
  j["revision"] = s.revision;
  return j;
}

Response SessionService::create(const json& body) {
  if (!body.is_object() || !body.contains("source") || !body["source"].is_string())
    return error_response(400, "bad-request", "body must be an object with a string 'source'");
  const std::string source = body["source"].get<std::string>();
  if (source.size() > config_.max_body) return error_response(413, "too-large", "source exceeds the size limit");
  SimOptions opts;
  if (auto err = parse_options(body, opts)) return *err;
  InputTape tape;
  if (body.contains("input")) {
    if (!body["input"].is_array()) return error_response(400, "bad-request", "input must be an array of strings");
    for (const json& line : body["input"]) {
      if (!line.is_string()) return error_response(400, "bad-request", "input must be an array of strings");
      tape.push_back(line.get<std::string>());
    }
  }

  AssemblyResult asm_result = assemble(source);
  if (!asm_result.ok()) {
    json diags = json::array();
    for (const auto& d : asm_result.diagnostics) diags.push_back(wire::to_json(d));
    return {422, json{{"error", {{"code", "assembly-failed"}, {"message", "the program did not assemble"}}},
                      {"diagnostics", diags}}};
  }
  auto image = std::make_shared<const ProgramImage>(std::move(*asm_result.image));
  if (image->text.empty()) return error_response(422, "empty-program", "the program has no instructions");

  expire_idle();
  auto s = std::make_shared<Session>();
  s->image = image;
  s->source = source;
  s->options = opts;
  s->log.emplace(init(image, opts), std::move(tape));
  s->touched = clock_();
  {
    std::lock_guard lk(mu_);
    if (sessions_.size() >= config_.max_sessions)
      return error_response(503, "too-many-sessions", fmt::format("session limit of {} reached", config_.max_sessions));
    s->id = new_id();
    sessions_.emplace(s->id, s);
  }
  json out = payload(*s, 0);
  json warnings = json::array();
  for (const auto& d : asm_result.diagnostics) warnings.push_back(wire::to_json(d));
  out["diagnostics"] = warnings;
  return {201, out};
}

Response SessionService::step(std::string_view id, const json& body) {
  auto n = count_arg(body);
  if (!n) return error_response(400, "bad-request", "n must be a positive integer");
  auto s = find(id);
  if (!s) return unknown_session(id);
  std::unique_lock lk(s->mu);
  HistoryLog& log = *s->log;
  const uint64_t prev = log.current().cycle();
  const SimState& cur = log.current();
  if (cur.status().state == RunState::AwaitingInput)
    return error_response(409, "awaiting-input", "console input is pending");
  if (!cur.running())
    return error_response(409, "not-running", fmt::format("simulation is {}", run_state_name(cur.status().state)));
  for (uint64_t i = 0; i < *n && log.current().running(); ++i) log.step();
  ++s->revision;
  json out = payload(*s, prev);
  s->high_water = std::max(s->high_water, log.current().cycle());
  return {200, out};
}

Response SessionService::back(std::string_view id, const json& body) {
  auto n = count_arg(body);
  if (!n) return error_response(400, "bad-request", "n must be a positive integer");
  auto s = find(id);
  if (!s) return unknown_session(id);
  std::unique_lock lk(s->mu);
  HistoryLog& log = *s->log;
  const uint64_t prev = log.current().cycle();
  for (uint64_t i = 0; i < *n; ++i) {
    if (log.cursor() == 0 && log.current().status().state != RunState::AwaitingInput) break;
    log.step_back();
  }
  ++s->revision;
  return {200, payload(*s, prev)};
}

Response SessionService::input(std::string_view id, const json& body) {
  if (!body.is_object() || !body.contains("text") || !body["text"].is_string())
    return error_response(400, "bad-request", "body must be an object with a string 'text'");
  auto s = find(id);
  if (!s) return unknown_session(id);
  std::unique_lock lk(s->mu);
  HistoryLog& log = *s->log;
  if (log.current().status().state != RunState::AwaitingInput)
    return error_response(409, "no-pending-input", "the program is not waiting for input");
  const uint64_t prev = log.current().cycle();
  const InputOutcome r = log.provide_input(body["text"].get<std::string>());
  ++s->revision;
  json out = payload(*s, prev);
  s->high_water = std::max(s->high_water, log.current().cycle());
  out["input"] = {{"accepted", r.accepted}, {"error", r.error}};
  return {200, out};
}

Response SessionService::reset(std::string_view id, const json& body) {
  auto s = find(id);
  if (!s) return unknown_session(id);
  std::unique_lock lk(s->mu);
  SimOptions opts = s->options;
  if (auto err = parse_options(body, opts)) return *err;
  s->options = opts;
  s->log.emplace(init(s->image, opts));
  s->high_water = 0;
  ++s->revision;
  return {200, payload(*s, 0)};
}

Response SessionService::state(std::string_view id) {
  auto s = find(id);
  if (!s) return unknown_session(id);
  std::shared_lock lk(s->mu);
  return {200, payload(*s, s->log->current().cycle())};
}

Response SessionService::memory(std::string_view id, std::string_view segment, std::string_view addr,
                                std::string_view len) {
  auto seg = parse_segment(segment);
  if (!seg) return error_response(400, "bad-segment", fmt::format("unknown segment '{}'", segment));
  auto s = find(id);
  if (!s) return unknown_session(id);
  std::shared_lock lk(s->mu);
  const MachineState& m = s->log->current().machine;
  const uint64_t a = addr.empty() ? m.segment_bounds(*seg).first : wire::parse_u64(addr).value_or(UINT64_MAX);
  const auto l = len.empty() ? std::optional<uint64_t>{256} : wire::parse_u64(len);
  if (a == UINT64_MAX || !l) return error_response(400, "bad-range", "addr and len must be numbers");
  try {
    auto rows = memory_window(m, *seg, a, *l);
    const auto [lo, hi] = m.segment_bounds(*seg);
    return {200, json{{"segment", segment_name(*seg)},
                      {"bounds", {{"start", wire::hex(lo)}, {"end", wire::hex(hi)}}},
                      {"addr", wire::hex(a)},
                      {"len", *l},
                      {"rows", wire::to_json(rows)}}};
  } catch (const WindowError& e) {
    return error_response(400, "bad-range", e.what());
  }
}

Response SessionService::diagram(std::string_view id, std::string_view mode) {
  if (mode.empty()) mode = "full";
  if (mode != "full" && mode != "squashed")
    return error_response(400, "bad-mode", fmt::format("diagram mode must be 'full' or 'squashed', not '{}'", mode));
  auto s = find(id);
  if (!s) return unknown_session(id);
  std::shared_lock lk(s->mu);
  std::vector<DatapathSnapshot> trace;
  for (uint64_t c = 1; c <= s->log->cursor(); ++c) trace.push_back(snapshot(s->log->at(c)));
  PipelineDiagram d = build_diagram(trace);
  if (mode == "squashed") d = squash(d);
  json out = wire::to_json(d);
  out["csv"] = render_csv(d);
  out["text"] = render_text(d);
  return {200, out};
}

Response SessionService::examples() const {
  json list = json::array();
  for (const Example& e : builtin_examples())
    list.push_back({{"name", e.name}, {"description", e.description}, {"source", e.source}});
  return {200, json{{"examples", list}}};
}

Response SessionService::catalog() const { return {200, wire::catalog()}; }

Response SessionService::close(std::string_view id) {
  std::lock_guard lk(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return unknown_session(id);
  sessions_.erase(it);
  return {200, json{{"closed", std::string(id)}}};
}

}  // namespace rvpipe
