#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace zonec {

struct Gate {
  enum class Kind : uint8_t { OneQubit, Cz };

  Kind kind = Kind::OneQubit;
  std::string name;                   ///< opaque label, one-qubit gates only
  std::array<uint32_t, 2> qubits{};   ///< operands; [1] unused for one-qubit

  [[nodiscard]] auto numOperands() const -> size_t {
    return kind == Kind::Cz ? 2 : 1;
  }
  [[nodiscard]] auto actsOn(uint32_t q) const -> bool {
    return qubits[0] == q || (kind == Kind::Cz && qubits[1] == q);
  }

  static auto oneQubit(std::string name, uint32_t q) -> Gate {
    return {Kind::OneQubit, std::move(name), {q, 0}};
  }
  static auto cz(uint32_t a, uint32_t b) -> Gate {
    return {Kind::Cz, "cz", {a, b}};
  }

  friend auto operator==(const Gate&, const Gate&) -> bool = default;
};

struct Circuit {
  size_t numQubits = 0;
  std::vector<Gate> gates;

  friend auto operator==(const Circuit&, const Circuit&) -> bool = default;
};

enum class CircuitFormat : uint8_t { Qasm, Json };

struct CircuitParseError : std::runtime_error {
  size_t line;
  size_t column;
  CircuitParseError(const std::string& msg, size_t lineNo, size_t colNo)
      : std::runtime_error(msg + " (line " + std::to_string(lineNo) +
                           ", column " + std::to_string(colNo) + ")"),
        line(lineNo), column(colNo) {}
};

struct UnsupportedGateError : std::runtime_error {
  std::string gate;
  explicit UnsupportedGateError(std::string gateName)
      : std::runtime_error("unsupported gate: " + gateName),
        gate(std::move(gateName)) {}
};

namespace detail {

/// Cursor over QASM text with line/column tracking.
class QasmLexer {
public:
  explicit QasmLexer(std::string_view text) : text_(text) {}

  void skipSpaceAndComments() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') {
          advance();
        }
      } else if (std::isspace(static_cast<unsigned char>(c)) != 0) {
        advance();
      } else {
        break;
      }
    }
  }

  [[nodiscard]] auto atEnd() -> bool {
    skipSpaceAndComments();
    return pos_ >= text_.size();
  }

  [[nodiscard]] auto peek() -> char {
    skipSpaceAndComments();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  auto identifier() -> std::string {
    skipSpaceAndComments();
    const size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) != 0 ||
            text_[pos_] == '_')) {
      advance();
    }
    if (start == pos_) {
      fail("expected identifier");
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  auto integer() -> size_t {
    skipSpaceAndComments();
    const size_t start = pos_;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_])) != 0) {
      advance();
    }
    if (start == pos_) {
      fail("expected integer");
    }
    return std::stoull(std::string(text_.substr(start, pos_ - start)));
  }

  void expect(char c) {
    skipSpaceAndComments();
    if (pos_ >= text_.size() || text_[pos_] != c) {
      fail(std::string("expected '") + c + "'");
    }
    advance();
  }

  auto consume(char c) -> bool {
    skipSpaceAndComments();
    if (pos_ < text_.size() && text_[pos_] == c) {
      advance();
      return true;
    }
    return false;
  }

  /// Skips a balanced parenthesized parameter list, e.g. of rz(pi/4).
  void skipParams() {
    if (!consume('(')) {
      return;
    }
    int depth = 1;
    while (pos_ < text_.size() && depth > 0) {
      if (text_[pos_] == '(') {
        ++depth;
      } else if (text_[pos_] == ')') {
        --depth;
      }
      advance();
    }
    if (depth != 0) {
      fail("unterminated parameter list");
    }
  }

  void skipToSemicolon() {
    while (pos_ < text_.size() && text_[pos_] != ';') {
      advance();
    }
    if (pos_ < text_.size()) {
      advance();
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw CircuitParseError(msg, line_, col_);
  }

private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string_view text_;
  size_t pos_ = 0;
  size_t line_ = 1;
  size_t col_ = 1;
};

} // namespace detail

/**
 * Parses the OpenQASM 2.0 subset: optional OPENQASM/include headers, qreg
 * declarations, named one-qubit gates (parameters skipped), and cz. Any
 * other multi-qubit gate or statement is rejected; callers decompose first.
 */
inline auto parseQasm(std::string_view text) -> Circuit {
  detail::QasmLexer lex(text);
  Circuit circuit;
  std::vector<std::pair<std::string, size_t>> registers; // (name, offset)

  auto qubitIndex = [&](const std::string& reg, size_t idx,
                        detail::QasmLexer& l) -> uint32_t {
    for (const auto& [name, offset] : registers) {
      if (name == reg) {
        const size_t flat = offset + idx;
        if (flat >= circuit.numQubits) {
          l.fail("qubit index out of range: " + reg + "[" +
                 std::to_string(idx) + "]");
        }
        return static_cast<uint32_t>(flat);
      }
    }
    l.fail("unknown register: " + reg);
  };

  while (!lex.atEnd()) {
    const std::string word = lex.identifier();
    if (word == "OPENQASM") {
      lex.skipToSemicolon();
    } else if (word == "include") {
      lex.skipToSemicolon();
    } else if (word == "qreg") {
      const std::string name = lex.identifier();
      lex.expect('[');
      const size_t size = lex.integer();
      lex.expect(']');
      lex.expect(';');
      registers.emplace_back(name, circuit.numQubits);
      circuit.numQubits += size;
    } else if (word == "creg" || word == "measure" || word == "barrier" ||
               word == "reset" || word == "if" || word == "gate" ||
               word == "opaque") {
      throw UnsupportedGateError(word);
    } else {
      // a gate application
      lex.skipParams();
      std::vector<uint32_t> operands;
      while (true) {
        const std::string reg = lex.identifier();
        lex.expect('[');
        const size_t idx = lex.integer();
        lex.expect(']');
        operands.push_back(qubitIndex(reg, idx, lex));
        if (!lex.consume(',')) {
          break;
        }
      }
      lex.expect(';');
      if (word == "cz") {
        if (operands.size() != 2 || operands[0] == operands[1]) {
          lex.fail("cz needs two distinct operands");
        }
        circuit.gates.push_back(Gate::cz(operands[0], operands[1]));
      } else if (operands.size() == 1) {
        circuit.gates.push_back(Gate::oneQubit(word, operands[0]));
      } else {
        throw UnsupportedGateError(word);
      }
    }
  }
  return circuit;
}

inline auto circuitToJson(const Circuit& circuit) -> nlohmann::json {
  nlohmann::json gates = nlohmann::json::array();
  for (const auto& g : circuit.gates) {
    nlohmann::json gj;
    if (g.kind == Gate::Kind::Cz) {
      gj["kind"] = "cz";
      gj["operands"] = {g.qubits[0], g.qubits[1]};
    } else {
      gj["kind"] = "1q";
      gj["name"] = g.name;
      gj["operands"] = {g.qubits[0]};
    }
    gates.push_back(std::move(gj));
  }
  return {{"num_qubits", circuit.numQubits}, {"gates", std::move(gates)}};
}

inline auto parseCircuitJson(const std::string& text) -> Circuit {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw CircuitParseError(std::string("invalid JSON: ") + e.what(), 1, 1);
  }
  Circuit circuit;
  if (!j.contains("num_qubits") || !j.contains("gates")) {
    throw CircuitParseError("circuit JSON needs num_qubits and gates", 1, 1);
  }
  circuit.numQubits = j["num_qubits"].get<size_t>();
  for (const auto& gj : j["gates"]) {
    const auto kind = gj.value("kind", "");
    const auto& ops = gj["operands"];
    auto operand = [&](size_t i) -> uint32_t {
      const auto q = ops[i].get<uint64_t>();
      if (q >= circuit.numQubits) {
        throw CircuitParseError("operand out of range: " + std::to_string(q),
                                1, 1);
      }
      return static_cast<uint32_t>(q);
    };
    if (kind == "cz") {
      if (ops.size() != 2) {
        throw CircuitParseError("cz needs two operands", 1, 1);
      }
      const auto a = operand(0);
      const auto b = operand(1);
      if (a == b) {
        throw CircuitParseError("cz operands must be distinct", 1, 1);
      }
      circuit.gates.push_back(Gate::cz(a, b));
    } else if (kind == "1q") {
      if (ops.size() != 1) {
        throw CircuitParseError("1q gate needs one operand", 1, 1);
      }
      circuit.gates.push_back(
          Gate::oneQubit(gj.value("name", "u"), operand(0)));
    } else {
      throw UnsupportedGateError(kind.empty() ? "<missing kind>" : kind);
    }
  }
  return circuit;
}

inline auto parseCircuit(const std::string& text, CircuitFormat format)
    -> Circuit {
  Circuit circuit = format == CircuitFormat::Qasm ? parseQasm(text)
                                                  : parseCircuitJson(text);
  for (const auto& g : circuit.gates) {
    for (size_t i = 0; i < g.numOperands(); ++i) {
      if (g.qubits[i] >= circuit.numQubits) {
        throw CircuitParseError("operand out of range", 1, 1);
      }
    }
  }
  return circuit;
}

/// Renders the circuit back as the QASM subset (for the generator CLI).
inline auto circuitToQasm(const Circuit& circuit) -> std::string {
  std::string out = "OPENQASM 2.0;\nqreg q[" +
                    std::to_string(circuit.numQubits) + "];\n";
  for (const auto& g : circuit.gates) {
    if (g.kind == Gate::Kind::Cz) {
      out += "cz q[" + std::to_string(g.qubits[0]) + "],q[" +
             std::to_string(g.qubits[1]) + "];\n";
    } else {
      out += g.name + " q[" + std::to_string(g.qubits[0]) + "];\n";
    }
  }
  return out;
}

} // namespace zonec
