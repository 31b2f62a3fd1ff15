#include "databand/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "databand/errors.hpp"

namespace databand {
namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& section, const std::string& what) {
  throw ValidationError("scenario section '" + section + "': " + what);
}

Json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(what + ": " + e.what());
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_json_text(buffer.str(), "'" + path.string() + "'");
}

double number_at(const Json& j, const char* key, const std::string& section) {
  if (!j.contains(key)) fail(section, std::string("missing field '") + key + "'");
  if (!j.at(key).is_number()) {
    fail(section, std::string("field '") + key + "' must be a number");
  }
  return j.at(key).get<double>();
}

// ---- deal-mix sampler parsing -------------------------------------------

RealSampler parse_real_sampler(const Json& j, const std::string& where) {
  if (j.is_number()) return FixedReal{j.get<double>()};
  if (j.is_object()) {
    if (j.contains("choice")) {
      ChoiceReal out;
      for (const auto& v : j.at("choice")) out.values.push_back(v.get<double>());
      return out;
    }
    if (j.contains("uniform")) {
      const auto& arr = j.at("uniform");
      if (!arr.is_array() || arr.size() != 2) {
        fail(where, "'uniform' expects [lo, hi]");
      }
      return UniformReal{arr[0].get<double>(), arr[1].get<double>()};
    }
    if (j.contains("triangular")) {
      const auto& arr = j.at("triangular");
      if (!arr.is_array() || arr.size() != 3) {
        fail(where, "'triangular' expects [min, mode, max]");
      }
      return TriangularReal{arr[0].get<double>(), arr[1].get<double>(),
                            arr[2].get<double>()};
    }
  }
  fail(where, "expected a number or {choice|uniform|triangular: ...}");
}

IntSampler parse_int_sampler(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return FixedInt{j.get<int>()};
  if (j.is_object()) {
    if (j.contains("choice")) {
      ChoiceInt out;
      for (const auto& v : j.at("choice")) out.values.push_back(v.get<int>());
      return out;
    }
    if (j.contains("uniform_int")) {
      const auto& arr = j.at("uniform_int");
      if (!arr.is_array() || arr.size() != 2) {
        fail(where, "'uniform_int' expects [lo, hi]");
      }
      return UniformInt{arr[0].get<int>(), arr[1].get<int>()};
    }
  }
  fail(where, "expected an integer or {choice|uniform_int: ...}");
}

LabelSampler parse_label_sampler(const Json& j, const std::string& where) {
  if (j.is_string()) return FixedLabel{j.get<std::string>()};
  if (j.is_object() && j.contains("choice")) {
    ChoiceLabel out;
    for (const auto& v : j.at("choice")) out.values.push_back(v.get<std::string>());
    return out;
  }
  fail(where, "expected a string or {choice: [...]} for technology_node");
}

RightsBundle parse_rights_bundle(const Json& j) {
  RightsBundle bundle;
  for (const auto& item : j) {
    bundle.push_back(
        {item.at("label").get<std::string>(), item.at("factor").get<double>()});
  }
  return bundle;
}

RightsSampler parse_rights_sampler(const Json& j, const std::string& where) {
  if (j.is_array()) return FixedRights{parse_rights_bundle(j)};
  if (j.is_object() && j.contains("choice")) {
    ChoiceRights out;
    for (const auto& bundle : j.at("choice")) {
      out.bundles.push_back(parse_rights_bundle(bundle));
    }
    return out;
  }
  fail(where, "rights_factors expects an array of {label, factor} or {choice: [...]}");
}

Json rights_bundle_to_json(const RightsBundle& bundle) {
  Json arr = Json::array();
  for (const auto& rf : bundle) {
    arr.push_back({{"label", rf.label}, {"factor", rf.factor}});
  }
  return arr;
}

Json real_sampler_to_json(const RealSampler& s) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, FixedReal>) {
          return v.value;
        } else if constexpr (std::is_same_v<T, ChoiceReal>) {
          return Json{{"choice", v.values}};
        } else if constexpr (std::is_same_v<T, UniformReal>) {
          return Json{{"uniform", {v.lo, v.hi}}};
        } else {
          return Json{{"triangular", {v.min, v.mode, v.max}}};
        }
      },
      s);
}

Json int_sampler_to_json(const IntSampler& s) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, FixedInt>) {
          return v.value;
        } else if constexpr (std::is_same_v<T, ChoiceInt>) {
          return Json{{"choice", v.values}};
        } else {
          return Json{{"uniform_int", {v.lo, v.hi}}};
        }
      },
      s);
}

Json label_sampler_to_json(const LabelSampler& s) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, FixedLabel>) {
          return v.value;
        } else {
          return Json{{"choice", v.values}};
        }
      },
      s);
}

Json rights_sampler_to_json(const RightsSampler& s) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, FixedRights>) {
          return rights_bundle_to_json(v.bundle);
        } else {
          Json choices = Json::array();
          for (const auto& b : v.bundles) choices.push_back(rights_bundle_to_json(b));
          return Json{{"choice", choices}};
        }
      },
      s);
}

// ---- sections -------------------------------------------------------------

DealAttributes parse_attributes(const Json& j, const std::string& section) {
  DealAttributes attrs;
  if (!j.contains("technology_node") || !j.at("technology_node").is_string()) {
    fail(section, "field 'technology_node' (string) is required");
  }
  attrs.technology_node = j.at("technology_node").get<std::string>();
  attrs.process_count = static_cast<int>(number_at(j, "process_count", section));
  attrs.quality_score = number_at(j, "quality_score", section);
  attrs.completeness_score = number_at(j, "completeness_score", section);
  attrs.age_months = number_at(j, "age_months", section);
  attrs.utility_value_usd = number_at(j, "utility_value_usd", section);
  if (j.contains("rights_factors")) {
    for (const auto& item : j.at("rights_factors")) {
      attrs.rights_factors.push_back({item.at("label").get<std::string>(),
                                      item.at("factor").get<double>()});
    }
  }
  if (j.contains("volume_mb") == j.contains("volume")) {
    fail(section, "exactly one of 'volume_mb' or 'volume' {value, unit} is required");
  }
  if (j.contains("volume_mb")) {
    attrs.volume_mb = number_at(j, "volume_mb", section);
  } else {
    const auto& vol = j.at("volume");
    attrs.volume_mb = volume_to_mb(number_at(vol, "value", section),
                                   vol.at("unit").get<std::string>());
  }
  return attrs;
}

NodeTable parse_node_table(const Json& j, const std::string& section) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "semiconductor-preset") return NodeTable::semiconductor_preset();
    fail(section, "unknown node table preset '" + name + "'");
  }
  if (!j.is_object()) fail(section, "node_table must be an object or a preset name");
  NodeTable table;
  for (const auto& [label, mult] : j.items()) {
    if (!mult.is_number()) fail(section, "node multipliers must be numbers");
    table.insert(label, mult.get<double>());
  }
  return table;
}

FormulaParams parse_formula(const Json& j, const std::string& section) {
  FormulaParams params;
  if (j.contains("coverage_scale")) params.coverage_scale = number_at(j, "coverage_scale", section);
  if (j.contains("qf_base")) params.qf_base = number_at(j, "qf_base", section);
  if (j.contains("qf_quality_weight")) params.qf_quality_weight = number_at(j, "qf_quality_weight", section);
  if (j.contains("qf_completeness_weight")) params.qf_completeness_weight = number_at(j, "qf_completeness_weight", section);
  if (j.contains("qf_age_weight")) params.qf_age_weight = number_at(j, "qf_age_weight", section);
  if (j.contains("qf_horizon_months")) params.qf_horizon_months = number_at(j, "qf_horizon_months", section);
  if (j.contains("utility_scale")) params.utility_scale = number_at(j, "utility_scale", section);
  if (j.contains("utility_denom_usd")) params.utility_denom_usd = number_at(j, "utility_denom_usd", section);
  if (j.contains("utility_log_base")) params.utility_log_base = number_at(j, "utility_log_base", section);
  return params;
}

Interval parse_interval(const Json& j, const std::string& section) {
  if (!j.is_array() || j.size() != 2) fail(section, "bounds must be [lo, hi]");
  Interval out;
  if (!j[0].is_null()) out.lo = j[0].get<double>();
  if (!j[1].is_null()) out.hi = j[1].get<double>();
  return out;
}

Json interval_to_json(const Interval& b) {
  Json lo = b.lo == -std::numeric_limits<double>::infinity() ? Json() : Json(b.lo);
  Json hi = b.hi == std::numeric_limits<double>::infinity() ? Json() : Json(b.hi);
  return Json::array({lo, hi});
}

NamedPredicate::Op parse_predicate_op(const std::string& op,
                                      const std::string& section) {
  if (op == "<") return NamedPredicate::Op::kLt;
  if (op == "<=") return NamedPredicate::Op::kLe;
  if (op == ">") return NamedPredicate::Op::kGt;
  if (op == ">=") return NamedPredicate::Op::kGe;
  fail(section, "predicate op must be one of <, <=, >, >=");
}

std::string predicate_op_name(NamedPredicate::Op op) {
  switch (op) {
    case NamedPredicate::Op::kLt: return "<";
    case NamedPredicate::Op::kLe: return "<=";
    case NamedPredicate::Op::kGt: return ">";
    case NamedPredicate::Op::kGe: return ">=";
  }
  return "?";
}

ConstraintSet parse_constraints(const Json& j, const std::string& section) {
  ConstraintSet out;
  if (j.contains("beta_bounds")) {
    const auto& bounds = j.at("beta_bounds");
    if (!bounds.is_array() || bounds.size() != kLeverCount) {
      fail(section, "beta_bounds must list exactly five [lo, hi] pairs");
    }
    for (std::size_t k = 0; k < kLeverCount; ++k) {
      out.beta_bounds[k] = parse_interval(bounds[k], section);
    }
  }
  if (j.contains("sigma_bounds")) {
    out.sigma_bounds = parse_interval(j.at("sigma_bounds"), section);
  }
  if (j.contains("predicates")) {
    for (const auto& p : j.at("predicates")) {
      NamedPredicate pred;
      pred.label = p.at("label").get<std::string>();
      pred.lhs = theta_component_from_name(p.at("lhs").get<std::string>());
      pred.op = parse_predicate_op(p.at("op").get<std::string>(), section);
      const auto& rhs = p.at("rhs");
      if (rhs.is_string()) {
        pred.rhs_component = theta_component_from_name(rhs.get<std::string>());
      } else if (rhs.is_number()) {
        pred.rhs_value = rhs.get<double>();
      } else {
        fail(section, "predicate rhs must be a number or a component name");
      }
      out.predicates.push_back(std::move(pred));
    }
  }
  return out;
}

DealTemplate parse_deal_template(const Json& j, const std::string& where) {
  DealTemplate t;
  t.technology_node = parse_label_sampler(j.at("technology_node"), where);
  t.process_count = parse_int_sampler(j.at("process_count"), where);
  t.quality_score = parse_real_sampler(j.at("quality_score"), where);
  t.completeness_score = parse_real_sampler(j.at("completeness_score"), where);
  t.age_months = parse_real_sampler(j.at("age_months"), where);
  t.utility_value_usd = parse_real_sampler(j.at("utility_value_usd"), where);
  if (j.contains("rights_factors")) {
    t.rights_factors = parse_rights_sampler(j.at("rights_factors"), where);
  }
  if (j.contains("volume_mb")) {
    t.volume_mb = parse_real_sampler(j.at("volume_mb"), where);
  }
  return t;
}

AttributeCondition::Op parse_condition_op(const std::string& op,
                                          const std::string& section) {
  using Op = AttributeCondition::Op;
  if (op == "==") return Op::kEq;
  if (op == "!=") return Op::kNe;
  if (op == "<") return Op::kLt;
  if (op == "<=") return Op::kLe;
  if (op == ">") return Op::kGt;
  if (op == ">=") return Op::kGe;
  fail(section, "class condition op must be one of ==, !=, <, <=, >, >=");
}

std::string condition_op_name(AttributeCondition::Op op) {
  using Op = AttributeCondition::Op;
  switch (op) {
    case Op::kEq: return "==";
    case Op::kNe: return "!=";
    case Op::kLt: return "<";
    case Op::kLe: return "<=";
    case Op::kGt: return ">";
    case Op::kGe: return ">=";
  }
  return "?";
}

PipelineSection parse_pipeline(const Json& j, const std::string& section) {
  PipelineSection out;
  const auto& mix = j.at("mix");
  for (const auto& comp : mix.at("components")) {
    DealMix::Component c;
    c.weight = comp.value("weight", 1.0);
    c.deal = parse_deal_template(comp.at("deal"), section);
    out.mix.components.push_back(std::move(c));
  }
  if (j.contains("classes")) {
    for (const auto& cls : j.at("classes")) {
      ConfigurationClass cc;
      cc.label = cls.at("label").get<std::string>();
      for (const auto& cond : cls.at("where")) {
        AttributeCondition c;
        c.field = attribute_field_from_name(cond.at("field").get<std::string>());
        c.op = parse_condition_op(cond.at("op").get<std::string>(), section);
        const auto& value = cond.at("value");
        if (c.field == AttributeCondition::Field::kTechnologyNode) {
          c.label = value.get<std::string>();
        } else {
          c.number = value.get<double>();
        }
        cc.conditions.push_back(std::move(c));
      }
      out.classes.push_back(std::move(cc));
    }
  }
  return out;
}

// Reachable value range of a real sampler, for static validity checks.
std::pair<double, double> sampler_range(const RealSampler& s) {
  return std::visit(
      [](const auto& v) -> std::pair<double, double> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, FixedReal>) {
          return {v.value, v.value};
        } else if constexpr (std::is_same_v<T, ChoiceReal>) {
          double lo = v.values.front(), hi = v.values.front();
          for (double x : v.values) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
          }
          return {lo, hi};
        } else if constexpr (std::is_same_v<T, UniformReal>) {
          return {v.lo, v.hi};
        } else {
          return {v.min, v.max};
        }
      },
      s);
}

void check_template_ranges(const DealTemplate& t, const NodeTable& table,
                           const std::string& section) {
  std::vector<std::string> labels;
  if (const auto* fixed = std::get_if<FixedLabel>(&t.technology_node)) {
    labels.push_back(fixed->value);
  } else {
    labels = std::get<ChoiceLabel>(t.technology_node).values;
  }
  for (const auto& label : labels) {
    if (!table.contains(label)) {
      fail(section, "technology_node: template can yield unknown node '" +
                        label + "'");
    }
  }
  const auto check_range = [&](const RealSampler& s, double lo_ok, double hi_ok,
                               const char* field) {
    const auto [lo, hi] = sampler_range(s);
    if (lo < lo_ok || hi > hi_ok) {
      fail(section, std::string(field) + ": sampler range [" +
                        std::to_string(lo) + ", " + std::to_string(hi) +
                        "] leaves the valid domain");
    }
  };
  constexpr double kInf = std::numeric_limits<double>::infinity();
  check_range(t.quality_score, 0.0, 1.0, "quality_score");
  check_range(t.completeness_score, 0.0, 1.0, "completeness_score");
  check_range(t.age_months, 0.0, kInf, "age_months");
  check_range(t.utility_value_usd, 0.0, kInf, "utility_value_usd");
  const auto [vol_lo, vol_hi] = sampler_range(t.volume_mb);
  if (!(vol_lo > 0.0)) fail(section, "volume_mb: sampler can yield <= 0");
  const auto check_bundle = [&](const RightsBundle& b) {
    for (const auto& rf : b) {
      if (!(rf.factor > 0.0)) {
        fail(section, "rights factor '" + rf.label + "' must be > 0");
      }
    }
  };
  if (const auto* fixed = std::get_if<FixedRights>(&t.rights_factors)) {
    check_bundle(fixed->bundle);
  } else {
    for (const auto& b : std::get<ChoiceRights>(t.rights_factors).bundles) {
      check_bundle(b);
    }
  }
}

}  // namespace

void Scenario::validate() const {
  if (name.empty()) fail("metadata", "scenario name is required");
  if (currency != "USD") fail("metadata", "currency must be USD");
  if (anchor.explicit_b0.has_value() == anchor.year.has_value()) {
    fail("anchor", "exactly one of 'b0_usd_per_mb' or 'year' is required");
  }
  deal.validate();
  if (!node_table.contains(deal.technology_node)) {
    fail("deal", "technology_node '" + deal.technology_node +
                     "' is not in the node table");
  }
  if (enforce_node_monotonicity) {
    const auto violations = node_table.monotonicity_violations();
    if (!violations.empty()) {
      fail("deal", "node table is not monotone: '" + violations.front().first +
                       "' prices below '" + violations.front().second + "'");
    }
  }
  if (!(formula.qf_horizon_months > 0.0)) {
    fail("deal", "formula: qf_horizon_months must be > 0");
  }
  if (!(formula.utility_denom_usd > 0.0)) {
    fail("deal", "formula: utility_denom_usd must be > 0");
  }
  if (!(formula.utility_log_base > 1.0)) {
    fail("deal", "formula: utility_log_base must be > 1");
  }
  if (formula.coverage_scale < 0.0 || formula.utility_scale < 0.0) {
    fail("deal", "formula: scales must be >= 0");
  }
  prior.validate();
  constraints.validate();
  plan.validate();
  // the attribute-to-multiplier map must succeed before any sampling
  (void)map_attributes(deal, node_table, formula);
  if (pipeline) {
    pipeline->mix.validate();
    for (std::size_t k = 0; k < pipeline->mix.components.size(); ++k) {
      check_template_ranges(pipeline->mix.components[k].deal, node_table,
                            "pipeline (component " + std::to_string(k) + ")");
    }
    for (const auto& cls : pipeline->classes) {
      if (cls.label.empty()) fail("pipeline", "classes must carry a label");
      // bounded satisfiability probe, deterministic
      RngStream probe = RngStream::for_world(0, 0, RngStream::Lane::kProbe);
      bool hit = false;
      for (int i = 0; i < 20000 && !hit; ++i) {
        hit = cls.matches(sample_deal(pipeline->mix, probe));
      }
      if (!hit) {
        fail("pipeline", "class '" + cls.label +
                             "' matched nothing in a 20000-draw probe");
      }
    }
  }
}

bool Scenario::operator==(const Scenario& other) const {
  return name == other.name && currency == other.currency &&
         year == other.year && anchor == other.anchor && deal == other.deal &&
         node_table == other.node_table &&
         enforce_node_monotonicity == other.enforce_node_monotonicity &&
         formula == other.formula && prior == other.prior &&
         constraints == other.constraints && plan == other.plan &&
         pipeline == other.pipeline;
}

Scenario parse_scenario(const std::string& text,
                        const std::filesystem::path& base_dir) {
  const Json doc = parse_json_text(text, "scenario");
  Scenario s;
  try {
    if (!doc.contains("name")) fail("metadata", "field 'name' is required");
    s.name = doc.at("name").get<std::string>();
    s.currency = doc.value("currency", std::string("USD"));
    if (doc.contains("year")) s.year = doc.at("year").get<int>();

    if (!doc.contains("anchor")) fail("anchor", "section is required");
    const auto& anchor = doc.at("anchor");
    if (anchor.contains("b0_usd_per_mb")) {
      s.anchor.explicit_b0 = anchor.at("b0_usd_per_mb").get<double>();
    }
    if (anchor.contains("year")) s.anchor.year = anchor.at("year").get<int>();
    if (anchor.contains("dataset")) {
      s.anchor.dataset_path = anchor.at("dataset").get<std::string>();
    }
    if (s.anchor.explicit_b0.has_value() == s.anchor.year.has_value()) {
      fail("anchor", "exactly one of 'b0_usd_per_mb' or 'year' is required");
    }

    if (!doc.contains("deal")) fail("deal", "section is required");
    const auto& deal = doc.at("deal");
    s.deal = parse_attributes(deal.at("attributes"), "deal.attributes");
    if (!deal.contains("node_table")) fail("deal", "node_table is required");
    s.node_table = parse_node_table(deal.at("node_table"), "deal.node_table");
    s.enforce_node_monotonicity = deal.value("enforce_node_monotonicity", true);
    if (deal.contains("formula")) {
      s.formula = parse_formula(deal.at("formula"), "deal.formula");
    }

    if (!doc.contains("prior")) fail("prior", "section is required");
    const auto& prior = doc.at("prior");
    s.prior.s_alpha = number_at(prior, "s_alpha", "prior");
    const auto& mu = prior.at("mu");
    const auto& sd = prior.at("s");
    if (!mu.is_array() || mu.size() != kLeverCount || !sd.is_array() ||
        sd.size() != kLeverCount) {
      fail("prior", "'mu' and 's' must be arrays of five numbers");
    }
    for (std::size_t j = 0; j < kLeverCount; ++j) {
      s.prior.mu[j] = mu[j].get<double>();
      s.prior.s[j] = sd[j].get<double>();
    }
    s.prior.s_sigma = number_at(prior, "s_sigma", "prior");

    if (doc.contains("constraints")) {
      s.constraints = parse_constraints(doc.at("constraints"), "constraints");
    }

    if (!doc.contains("plan")) fail("plan", "section is required");
    const auto& plan = doc.at("plan");
    s.plan.worlds = plan.at("worlds").get<std::int64_t>();
    s.plan.draws_per_world = plan.at("draws_per_world").get<std::int64_t>();
    s.plan.seed = plan.value("seed", std::uint64_t{0});
    if (plan.contains("quantiles")) {
      s.plan.quantiles.clear();
      for (const auto& q : plan.at("quantiles")) {
        s.plan.quantiles.push_back(q.get<double>());
      }
    }

    if (doc.contains("pipeline")) {
      s.pipeline = parse_pipeline(doc.at("pipeline"), "pipeline");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("scenario: ") + e.what());
  }

  // Resolve the anchor into the prior's baseline.
  if (s.anchor.explicit_b0) {
    s.prior.b0 = *s.anchor.explicit_b0;
    s.b0_provenance = "explicit";
  } else {
    const AnchorDataset dataset =
        s.anchor.dataset_path
            ? AnchorDataset::load(base_dir / *s.anchor.dataset_path)
            : AnchorDataset::builtin();
    const auto lookup = dataset.anchor_for_year(*s.anchor.year);
    s.prior.b0 = lookup.b0;
    std::ostringstream provenance;
    provenance << "anchor dataset " << dataset.version() << ", year "
               << *s.anchor.year << (lookup.is_projection ? " (projection)" : "");
    s.b0_provenance = provenance.str();
  }

  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path.parent_path());
}

std::string serialize_scenario(const Scenario& s) {
  Json doc;
  doc["name"] = s.name;
  doc["currency"] = s.currency;
  if (s.year) doc["year"] = *s.year;

  Json anchor;
  if (s.anchor.explicit_b0) anchor["b0_usd_per_mb"] = *s.anchor.explicit_b0;
  if (s.anchor.year) anchor["year"] = *s.anchor.year;
  if (s.anchor.dataset_path) anchor["dataset"] = *s.anchor.dataset_path;
  doc["anchor"] = anchor;

  Json attrs;
  attrs["technology_node"] = s.deal.technology_node;
  attrs["process_count"] = s.deal.process_count;
  attrs["quality_score"] = s.deal.quality_score;
  attrs["completeness_score"] = s.deal.completeness_score;
  attrs["age_months"] = s.deal.age_months;
  attrs["utility_value_usd"] = s.deal.utility_value_usd;
  attrs["rights_factors"] = rights_bundle_to_json(s.deal.rights_factors);
  attrs["volume_mb"] = s.deal.volume_mb;

  Json deal;
  deal["attributes"] = attrs;
  Json table;
  for (const auto& [label, mult] : s.node_table.entries()) table[label] = mult;
  deal["node_table"] = table;
  deal["enforce_node_monotonicity"] = s.enforce_node_monotonicity;
  deal["formula"] = {{"coverage_scale", s.formula.coverage_scale},
                     {"qf_base", s.formula.qf_base},
                     {"qf_quality_weight", s.formula.qf_quality_weight},
                     {"qf_completeness_weight", s.formula.qf_completeness_weight},
                     {"qf_age_weight", s.formula.qf_age_weight},
                     {"qf_horizon_months", s.formula.qf_horizon_months},
                     {"utility_scale", s.formula.utility_scale},
                     {"utility_denom_usd", s.formula.utility_denom_usd},
                     {"utility_log_base", s.formula.utility_log_base}};
  doc["deal"] = deal;

  doc["prior"] = {{"s_alpha", s.prior.s_alpha},
                  {"mu", s.prior.mu},
                  {"s", s.prior.s},
                  {"s_sigma", s.prior.s_sigma}};

  Json constraints;
  Json beta_bounds = Json::array();
  for (const auto& b : s.constraints.beta_bounds) {
    beta_bounds.push_back(interval_to_json(b));
  }
  constraints["beta_bounds"] = beta_bounds;
  if (s.constraints.sigma_bounds.bounded()) {
    constraints["sigma_bounds"] = interval_to_json(s.constraints.sigma_bounds);
  }
  if (!s.constraints.predicates.empty()) {
    Json predicates = Json::array();
    for (const auto& p : s.constraints.predicates) {
      Json pj;
      pj["label"] = p.label;
      pj["lhs"] = theta_component_name(p.lhs);
      pj["op"] = predicate_op_name(p.op);
      if (p.rhs_component) {
        pj["rhs"] = theta_component_name(*p.rhs_component);
      } else {
        pj["rhs"] = p.rhs_value;
      }
      predicates.push_back(pj);
    }
    constraints["predicates"] = predicates;
  }
  doc["constraints"] = constraints;

  doc["plan"] = {{"worlds", s.plan.worlds},
                 {"draws_per_world", s.plan.draws_per_world},
                 {"seed", s.plan.seed},
                 {"quantiles", s.plan.quantiles}};

  if (s.pipeline) {
    Json components = Json::array();
    for (const auto& c : s.pipeline->mix.components) {
      Json tj;
      tj["technology_node"] = label_sampler_to_json(c.deal.technology_node);
      tj["process_count"] = int_sampler_to_json(c.deal.process_count);
      tj["quality_score"] = real_sampler_to_json(c.deal.quality_score);
      tj["completeness_score"] = real_sampler_to_json(c.deal.completeness_score);
      tj["age_months"] = real_sampler_to_json(c.deal.age_months);
      tj["utility_value_usd"] = real_sampler_to_json(c.deal.utility_value_usd);
      tj["rights_factors"] = rights_sampler_to_json(c.deal.rights_factors);
      tj["volume_mb"] = real_sampler_to_json(c.deal.volume_mb);
      components.push_back({{"weight", c.weight}, {"deal", tj}});
    }
    Json pipeline;
    pipeline["mix"] = {{"components", components}};
    if (!s.pipeline->classes.empty()) {
      Json classes = Json::array();
      for (const auto& cls : s.pipeline->classes) {
        Json where = Json::array();
        for (const auto& c : cls.conditions) {
          Json cj;
          cj["field"] = attribute_field_name(c.field);
          cj["op"] = condition_op_name(c.op);
          if (c.field == AttributeCondition::Field::kTechnologyNode) {
            cj["value"] = c.label;
          } else {
            cj["value"] = c.number;
          }
          where.push_back(cj);
        }
        classes.push_back({{"label", cls.label}, {"where", where}});
      }
      pipeline["classes"] = classes;
    }
    doc["pipeline"] = pipeline;
  }

  return doc.dump(2) + "\n";
}

std::vector<ObservedDeal> load_observed_deals(
    const std::filesystem::path& path) {
  const Json doc = read_json_file(path);
  std::vector<ObservedDeal> deals;
  try {
    for (const auto& d : doc.at("deals")) {
      MultiplierVector x(d.at("x_tn").get<double>(), d.at("x_cov").get<double>(),
                         d.at("x_qf").get<double>(), d.at("x_util").get<double>(),
                         d.at("x_rights").get<double>());
      ObservedDeal deal{x, d.at("price_usd_per_mb").get<double>(),
                        d.value("label", std::string())};
      deal.validate();
      deals.push_back(std::move(deal));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("observed deals '" + path.string() + "': " + e.what());
  }
  return deals;
}

}  // namespace databand
