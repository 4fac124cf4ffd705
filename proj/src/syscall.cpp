#include "rvpipe/syscall.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace rvpipe {
namespace {

constexpr uint64_t kMaxPrintString = 1 << 20;

std::string_view strip_newline(std::string_view s) {
  if (!s.empty() && s.back() == '\n') s.remove_suffix(1);
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

std::optional<int64_t> parse_int(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

SyscallEffect fault(const MemAccessFault& f) {
  SyscallEffect e;
  e.kind = SyscallEffect::Kind::Fault;
  e.fault_message = f.message();
  e.mem_fault = f;
  return e;
}

}  // namespace

std::optional<SyscallKind> syscall_kind(uint64_t code) {
  switch (code) {
    case 1: case 4: case 5: case 8: case 9: case 10: case 11: case 12: case 17:
      return static_cast<SyscallKind>(code);
    default:
      return std::nullopt;
  }
}

std::string_view syscall_name(SyscallKind kind) {
  switch (kind) {
    case SyscallKind::PrintInt: return "print_int";
    case SyscallKind::PrintString: return "print_string";
    case SyscallKind::ReadInt: return "read_int";
    case SyscallKind::ReadString: return "read_string";
    case SyscallKind::Sbrk: return "sbrk";
    case SyscallKind::Exit: return "exit";
    case SyscallKind::PrintChar: return "print_char";
    case SyscallKind::ReadChar: return "read_char";
    case SyscallKind::Exit2: return "exit2";
  }
  return "?";
}

bool is_read_kind(SyscallKind k) {
  return k == SyscallKind::ReadInt || k == SyscallKind::ReadString || k == SyscallKind::ReadChar;
}

SyscallRequest make_request(const MachineState& m) {
  SyscallRequest r;
  r.code = m.read_reg(17);
  r.a0 = m.read_reg(10);
  r.a1 = m.read_reg(11);
  r.kind = syscall_kind(r.code);
  return r;
}

void Transcript::push(ConsoleEvent ev) {
  const size_t n = size() + 1;
  head_ = std::make_shared<const Node>(Node{std::move(ev), head_, n});
}

std::vector<ConsoleEvent> Transcript::events() const {
  std::vector<ConsoleEvent> out(size());
  size_t i = out.size();
  for (const Node* n = head_.get(); n; n = n->prev.get()) out[--i] = n->event;
  return out;
}

std::string Transcript::output_text() const {
  std::string out;
  for (const auto& ev : events())
    if (ev.direction == Direction::Out) out += ev.text;
  return out;
}

bool Transcript::operator==(const Transcript& other) const {
  if (size() != other.size()) return false;
  const Node* a = head_.get();
  const Node* b = other.head_.get();
  for (; a && b; a = a->prev.get(), b = b->prev.get()) {
    if (a == b) return true;
    if (!(a->event == b->event)) return false;
  }
  return true;
}

InputCheck validate_input(SyscallKind kind, std::string_view text) {
  InputCheck c;
  const std::string_view line = strip_newline(text);
  switch (kind) {
    case SyscallKind::ReadInt:
      if (!parse_int(line)) {
        c.error = "expected a decimal integer";
        return c;
      }
      break;
    case SyscallKind::ReadChar:
      if (line.empty()) {
        // An empty line reads as the newline character itself.
        c.ok = true;
        c.normalized = "\n";
        return c;
      }
      break;
    case SyscallKind::ReadString:
      break;
    default:
      c.error = "no input is expected";
      return c;
  }
  c.ok = true;
  c.normalized = std::string(line);
  return c;
}

SyscallEffect dispatch(MachineState& m, Console& console, const SyscallRequest& req, const InputTape& tape,
                       uint64_t cycle) {
  SyscallEffect effect;
  if (!req.kind) {
    effect.kind = SyscallEffect::Kind::Fault;
    effect.fault_message = "unknown syscall " + std::to_string(req.code);
    return effect;
  }
  auto out = [&](std::string text) { console.transcript.push(ConsoleEvent{Direction::Out, std::move(text), cycle}); };

  switch (*req.kind) {
    case SyscallKind::PrintInt:
      out(std::to_string(static_cast<int64_t>(req.a0)));
      break;
    case SyscallKind::PrintChar:
      out(std::string(1, static_cast<char>(req.a0 & 0xFF)));
      break;
    case SyscallKind::PrintString: {
      std::string s;
      for (uint64_t a = req.a0;; ++a) {
        auto r = m.load(a, 1, false);
        if (r.fault) return fault(*r.fault);
        if (r.value == 0) break;
        s.push_back(static_cast<char>(r.value));
        if (s.size() > kMaxPrintString) {
          effect.kind = SyscallEffect::Kind::Fault;
          effect.fault_message = "print_string: string is not NUL-terminated";
          return effect;
        }
      }
      out(std::move(s));
      break;
    }
    case SyscallKind::Sbrk: {
      const auto bytes = static_cast<int64_t>(req.a0);
      const uint64_t old = m.heap_break();
      const uint64_t grant = (static_cast<uint64_t>(std::max<int64_t>(bytes, 0)) + 7) & ~uint64_t{7};
      if (bytes < 0 || grant >= m.layout().stack_floor() - old) {
        effect.kind = SyscallEffect::Kind::Fault;
        effect.fault_message = "sbrk: request of " + std::to_string(bytes) + " bytes cannot be satisfied";
        return effect;
      }
      m.set_heap_break(old + grant);
      m.write_reg(10, old);
      break;
    }
    case SyscallKind::Exit:
    case SyscallKind::Exit2:
      effect.kind = SyscallEffect::Kind::Halt;
      effect.exit_code = *req.kind == SyscallKind::Exit2 ? static_cast<int64_t>(req.a0) : 0;
      break;
    case SyscallKind::ReadInt:
    case SyscallKind::ReadChar:
    case SyscallKind::ReadString: {
      if (console.tape_pos >= tape.size()) {
        effect.kind = SyscallEffect::Kind::NeedInput;
        return effect;
      }
      const std::string& text = tape[console.tape_pos];
      if (*req.kind == SyscallKind::ReadInt) {
        m.write_reg(10, static_cast<uint64_t>(parse_int(text).value_or(0)));
      } else if (*req.kind == SyscallKind::ReadChar) {
        m.write_reg(10, text.empty() ? uint64_t{'\n'} : static_cast<unsigned char>(text[0]));
      } else {
        const auto cap = static_cast<int64_t>(req.a1);
        if (cap > 0) {
          const size_t n = std::min<size_t>(text.size(), static_cast<size_t>(cap - 1));
          for (size_t i = 0; i <= n; ++i) {
            const uint8_t byte = i < n ? static_cast<uint8_t>(text[i]) : 0;
            if (auto f = m.store(req.a0 + i, 1, byte)) return fault(*f);
          }
        }
      }
      ++console.tape_pos;
      console.pending.reset();
      console.transcript.push(ConsoleEvent{Direction::In, text, cycle});
      break;
    }
  }
  return effect;
}

}  // namespace rvpipe
