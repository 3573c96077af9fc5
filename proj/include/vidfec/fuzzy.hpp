#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace vidfec {

// Mamdani inference with the fixed operator suite: min conjunction, max
// disjunction and aggregation, consequent clipping, centroid defuzzification
// over a 1000-point uniform discretization of the output universe.

enum class TermShape { Triangular, ShoulderLeft, ShoulderRight };

struct FuzzyTerm {
  std::string label;
  TermShape shape = TermShape::Triangular;
  double a = 0.0;
  double b = 1.0;

  // Triangular: support (a, b), apex at (a+b)/2. ShoulderLeft: full at or
  // below a, zero at or above b. ShoulderRight: zero at or below a, full at
  // or above b. All edges are straight lines.
  double membership(double x) const {
    switch (shape) {
      case TermShape::Triangular: {
        const double m = 0.5 * (a + b);
        if (x <= a || x >= b) return 0.0;
        return x <= m ? (x - a) / (m - a) : (b - x) / (b - m);
      }
      case TermShape::ShoulderLeft:
        if (x <= a) return 1.0;
        if (x >= b) return 0.0;
        return (b - x) / (b - a);
      case TermShape::ShoulderRight:
        if (x <= a) return 0.0;
        if (x >= b) return 1.0;
        return (x - a) / (b - a);
    }
    return 0.0;
  }
};

struct LinguisticVariable {
  std::string name;
  double universe_min = 0.0;
  double universe_max = 1.0;
  std::vector<FuzzyTerm> terms;

  LinguisticVariable() = default;
  LinguisticVariable(std::string name_, double lo, double hi, std::vector<FuzzyTerm> terms_)
      : name(std::move(name_)), universe_min(lo), universe_max(hi), terms(std::move(terms_)) {
    if (!(universe_min < universe_max))
      throw std::invalid_argument("LinguisticVariable " + name + ": empty universe");
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const auto& t = terms[i];
      if (!(t.a < t.b))
        throw std::invalid_argument("LinguisticVariable " + name + ": term " + t.label + " needs a < b");
      if (t.a < universe_min - 1e-12 || t.b > universe_max + 1e-12)
        throw std::invalid_argument("LinguisticVariable " + name + ": term " + t.label +
                                    " support leaves the universe");
      for (std::size_t j = i + 1; j < terms.size(); ++j) {
        if (terms[j].label == t.label)
          throw std::invalid_argument("LinguisticVariable " + name + ": duplicate term " + t.label);
      }
    }
  }

  const FuzzyTerm* find(const std::string& label) const {
    for (const auto& t : terms)
      if (t.label == label) return &t;
    return nullptr;
  }

  const FuzzyTerm& term(const std::string& label) const {
    const auto* t = find(label);
    if (!t) throw std::invalid_argument("variable " + name + " has no term " + label);
    return *t;
  }
};

// One antecedent clause: "variable is T1 [or T2 ...]". The clause degree is
// the maximum membership over its listed terms.
struct RuleAtom {
  std::string variable;
  std::vector<std::string> terms;
};

enum class Connective { And, Or };

struct MamdaniRule {
  std::vector<RuleAtom> antecedent;
  Connective connective = Connective::And;
  std::string consequent_term;
};

struct InferenceResult {
  double value = 0.0;
  bool activated = false;  // false: no rule fired, value is the universe midpoint
};

using FuzzyInputs = std::map<std::string, double>;

class FuzzyEngine {
 public:
  static constexpr int kCentroidSamples = 1000;

  FuzzyEngine() = default;
  explicit FuzzyEngine(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }

  void add_input(LinguisticVariable var) {
    if (find_input(var.name)) throw std::invalid_argument("duplicate input variable " + var.name);
    inputs_.push_back(std::move(var));
  }

  void set_output(LinguisticVariable var) { output_ = std::move(var); }

  const LinguisticVariable& input(const std::string& name) const {
    const auto* v = find_input(name);
    if (!v) throw std::invalid_argument("engine " + name_ + " has no input " + name);
    return *v;
  }
  const std::vector<LinguisticVariable>& inputs() const { return inputs_; }
  const LinguisticVariable& output() const { return output_; }
  const std::vector<MamdaniRule>& rules() const { return rules_; }

  void add_rule(MamdaniRule rule) {
    if (rule.antecedent.empty()) throw std::invalid_argument("rule needs at least one clause");
    for (const auto& atom : rule.antecedent) {
      const auto* var = find_input(atom.variable);
      if (!var) throw std::invalid_argument("rule references unknown input " + atom.variable);
      if (atom.terms.empty()) throw std::invalid_argument("rule clause for " + atom.variable + " lists no terms");
      for (const auto& t : atom.terms) var->term(t);  // throws on unknown term
    }
    output_.term(rule.consequent_term);
    rules_.push_back(std::move(rule));
  }

  InferenceResult infer(const FuzzyInputs& values) const {
    if (rules_.empty()) throw std::logic_error("engine " + name_ + " has no rules");
    std::vector<double> activation(rules_.size(), 0.0);
    for (std::size_t r = 0; r < rules_.size(); ++r) {
      const auto& rule = rules_[r];
      double acc = rule.connective == Connective::And ? 1.0 : 0.0;
      for (const auto& atom : rule.antecedent) {
        const auto it = values.find(atom.variable);
        if (it == values.end())
          throw std::invalid_argument("engine " + name_ + ": missing input value for " + atom.variable);
        const auto& var = input(atom.variable);
        double degree = 0.0;
        for (const auto& label : atom.terms) degree = std::max(degree, var.term(label).membership(it->second));
        acc = rule.connective == Connective::And ? std::min(acc, degree) : std::max(acc, degree);
      }
      activation[r] = acc;
    }

    const double lo = output_.universe_min;
    const double step = (output_.universe_max - lo) / kCentroidSamples;
    double num = 0.0, den = 0.0;
    for (int i = 0; i < kCentroidSamples; ++i) {
      const double x = lo + (i + 0.5) * step;
      double mu = 0.0;
      for (std::size_t r = 0; r < rules_.size(); ++r) {
        if (activation[r] <= 0.0) continue;
        const double clipped = std::min(activation[r], output_.term(rules_[r].consequent_term).membership(x));
        mu = std::max(mu, clipped);
      }
      num += x * mu;
      den += mu;
    }
    if (den <= 0.0) return {0.5 * (output_.universe_min + output_.universe_max), false};
    return {num / den, true};
  }

 private:
  const LinguisticVariable* find_input(const std::string& name) const {
    for (const auto& v : inputs_)
      if (v.name == name) return &v;
    return nullptr;
  }

  std::string name_;
  std::vector<LinguisticVariable> inputs_;
  LinguisticVariable output_{"out", 0.0, 1.0, {FuzzyTerm{"ANY", TermShape::ShoulderLeft, 0.0, 1.0}}};
  std::vector<MamdaniRule> rules_;
};

// Hierarchical composition: a layered DAG of engines. Each engine input is
// wired to exactly one source, either an external crisp input or the output
// of an engine added earlier (which makes the graph acyclic by construction).
struct HfsSource {
  enum class Kind { External, Node };
  Kind kind = Kind::External;
  std::string name;

  static HfsSource external(std::string n) { return {Kind::External, std::move(n)}; }
  static HfsSource node(std::string n) { return {Kind::Node, std::move(n)}; }
};

class HfsGraph {
 public:
  struct Node {
    std::string id;
    FuzzyEngine engine;
    std::map<std::string, HfsSource> wiring;  // engine input variable -> source
  };

  void add_node(std::string id, FuzzyEngine engine, std::map<std::string, HfsSource> wiring) {
    if (find(id)) throw std::invalid_argument("HfsGraph: duplicate node " + id);
    for (const auto& var : engine.inputs()) {
      const auto it = wiring.find(var.name);
      if (it == wiring.end())
        throw std::invalid_argument("HfsGraph: node " + id + " input " + var.name + " is unwired");
      if (it->second.kind == HfsSource::Kind::Node && !find(it->second.name))
        throw std::invalid_argument("HfsGraph: node " + id + " references undefined node " +
                                    it->second.name + " (nodes must be wired to earlier layers)");
    }
    for (const auto& [var, src] : wiring) {
      engine.input(var);  // throws when the wiring names a variable the engine lacks
      (void)src;
    }
    nodes_.push_back(Node{std::move(id), std::move(engine), std::move(wiring)});
  }

  const std::vector<Node>& nodes() const { return nodes_; }

  const Node& node(const std::string& id) const {
    const auto* n = find(id);
    if (!n) throw std::invalid_argument("HfsGraph: no node " + id);
    return *n;
  }

 private:
  friend struct HfsEvaluator;
  const Node* find(const std::string& id) const {
    for (const auto& n : nodes_)
      if (n.id == id) return &n;
    return nullptr;
  }

  std::vector<Node> nodes_;
};

struct HfsResult {
  double value = 0.0;
  bool activated = false;  // true only when every engine on the path fired
  std::map<std::string, InferenceResult> node_results;
};

// Evaluates nodes in insertion order (a valid topological order by
// construction); the final node's crisp output is the graph's result.
inline HfsResult hfs_infer(const HfsGraph& graph, const FuzzyInputs& externals) {
  if (graph.nodes().empty()) throw std::logic_error("hfs_infer: empty graph");
  HfsResult result;
  result.activated = true;
  std::map<std::string, double> node_values;
  for (const auto& node : graph.nodes()) {
    FuzzyInputs values;
    for (const auto& [var, src] : node.wiring) {
      if (src.kind == HfsSource::Kind::External) {
        const auto it = externals.find(src.name);
        if (it == externals.end())
          throw std::invalid_argument("hfs_infer: missing external input " + src.name);
        values[var] = it->second;
      } else {
        values[var] = node_values.at(src.name);
      }
    }
    const auto r = node.engine.infer(values);
    node_values[node.id] = r.value;
    result.node_results[node.id] = r;
    result.activated = result.activated && r.activated;
    result.value = r.value;
  }
  return result;
}

// --- Declarative engine files -----------------------------------------------
//
// Plain-text format, one construct per line (grammar also documented in
// docs/fuzzy-format.md):
//
//   # comment
//   engine NAME
//   input VAR MIN MAX
//     term LABEL triangular A B
//     term LABEL shoulder_left A B
//     term LABEL shoulder_right A B
//   output VAR MIN MAX
//     term ...
//   rule if VAR is TERM [or TERM ...] [and VAR is TERM ...] then OUTVAR is TERM
//
// Clause joiners must be uniform ("and" everywhere or "or" everywhere); "or"
// directly after a term adds an alternative term to the same clause when the
// following token is not a variable reference.

inline FuzzyEngine parse_engine_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("parse_engine_file: cannot open " + path);

  FuzzyEngine engine;
  std::string pending_var_name;
  double pending_lo = 0, pending_hi = 0;
  bool pending_is_output = false;
  bool have_pending = false;
  std::vector<FuzzyTerm> pending_terms;
  bool have_output = false;

  auto fail = [&](int line_no, const std::string& msg) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + msg);
  };

  auto flush_variable = [&](int line_no) {
    if (!have_pending) return;
    if (pending_terms.empty()) fail(line_no, "variable " + pending_var_name + " has no terms");
    LinguisticVariable var(pending_var_name, pending_lo, pending_hi, pending_terms);
    if (pending_is_output) {
      engine.set_output(std::move(var));
      have_output = true;
    } else {
      engine.add_input(std::move(var));
    }
    pending_terms.clear();
    have_pending = false;
  };

  auto parse_number = [&](const std::string& tok, int line_no) {
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) fail(line_no, "malformed number '" + tok + "'");
      return v;
    } catch (const std::logic_error&) {
      fail(line_no, "malformed number '" + tok + "'");
    }
    return 0.0;
  };

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    if (tok.empty()) continue;

    if (tok[0] == "engine") {
      if (tok.size() != 2) fail(line_no, "expected: engine NAME");
      engine = FuzzyEngine(tok[1]);
    } else if (tok[0] == "input" || tok[0] == "output") {
      if (tok.size() != 4) fail(line_no, "expected: " + tok[0] + " VAR MIN MAX");
      flush_variable(line_no);
      pending_var_name = tok[1];
      pending_lo = parse_number(tok[2], line_no);
      pending_hi = parse_number(tok[3], line_no);
      pending_is_output = tok[0] == "output";
      have_pending = true;
    } else if (tok[0] == "term") {
      if (!have_pending) fail(line_no, "term outside a variable block");
      if (tok.size() != 5) fail(line_no, "expected: term LABEL SHAPE A B");
      TermShape shape;
      if (tok[2] == "triangular")
        shape = TermShape::Triangular;
      else if (tok[2] == "shoulder_left")
        shape = TermShape::ShoulderLeft;
      else if (tok[2] == "shoulder_right")
        shape = TermShape::ShoulderRight;
      else {
        fail(line_no, "unknown term shape '" + tok[2] + "'");
        return engine;  // unreachable
      }
      pending_terms.push_back(FuzzyTerm{tok[1], shape, parse_number(tok[3], line_no), parse_number(tok[4], line_no)});
    } else if (tok[0] == "rule") {
      flush_variable(line_no);
      if (!have_output) fail(line_no, "rule before any output variable");
      if (tok.size() < 6 || tok[1] != "if") fail(line_no, "expected: rule if ... then VAR is TERM");
      MamdaniRule rule;
      bool joiner_seen = false;
      std::size_t i = 2;
      while (true) {
        if (i + 2 >= tok.size()) fail(line_no, "truncated rule clause");
        if (tok[i + 1] != "is") fail(line_no, "expected 'is' after variable " + tok[i]);
        RuleAtom atom;
        atom.variable = tok[i];
        atom.terms.push_back(tok[i + 2]);
        i += 3;
        while (i < tok.size() && tok[i] == "or" && i + 2 < tok.size() && tok[i + 2] != "is") {
          atom.terms.push_back(tok[i + 1]);
          i += 2;
        }
        rule.antecedent.push_back(std::move(atom));
        if (i >= tok.size()) fail(line_no, "rule is missing the 'then' part");
        if (tok[i] == "then") {
          ++i;
          break;
        }
        Connective joiner;
        if (tok[i] == "and")
          joiner = Connective::And;
        else if (tok[i] == "or")
          joiner = Connective::Or;
        else {
          fail(line_no, "expected 'and', 'or' or 'then', got '" + tok[i] + "'");
          return engine;  // unreachable
        }
        if (joiner_seen && joiner != rule.connective)
          fail(line_no, "mixed 'and'/'or' joiners are not supported");
        rule.connective = joiner;
        joiner_seen = true;
        ++i;
      }
      if (tok.size() - i != 3 || tok[i + 1] != "is") fail(line_no, "expected: then VAR is TERM");
      if (tok[i] != engine.output().name)
        fail(line_no, "consequent variable '" + tok[i] + "' is not the output variable");
      rule.consequent_term = tok[i + 2];
      try {
        engine.add_rule(std::move(rule));
      } catch (const std::invalid_argument& e) {
        fail(line_no, e.what());
      }
    } else {
      fail(line_no, "unknown directive '" + tok[0] + "'");
    }
  }
  flush_variable(line_no);
  if (engine.rules().empty()) throw std::runtime_error(path + ": engine defines no rules");
  return engine;
}

}  // namespace vidfec
