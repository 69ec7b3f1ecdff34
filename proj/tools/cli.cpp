#include "cli.hpp"

#include "spinquant/applications.hpp"
#include "spinquant/parse.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <optional>

namespace spinq::cli {

namespace {

using json = nlohmann::json;

class usage_error : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Globals {
  int n = 0;
  std::string pq;
  std::string format = "text";
  int max_deg = 2;
  std::string hbar = "1";

  Signature signature() const {
    if (pq.empty())
      return Signature(n > 0 ? n : 3, 0);
    auto comma = pq.find(',');
    if (comma == std::string::npos)
      throw usage_error("--pq expects p,q");
    int p = 0, q = 0;
    try {
      std::size_t a = 0, b = 0;
      p = std::stoi(pq.substr(0, comma), &a);
      q = std::stoi(pq.substr(comma + 1), &b);
      if (a != comma || b != pq.size() - comma - 1)
        throw usage_error("");
    } catch (const std::exception &) {
      throw usage_error("--pq expects p,q");
    }
    Signature sig(p, q);
    if (n > 0 && n != sig.n())
      throw usage_error("--n " + std::to_string(n) + " does not match --pq " + pq);
    return sig;
  }
  BracketConvention convention() const {
    return hbar == "formal" ? BracketConvention::formal() : BracketConvention::standard();
  }
  bool as_json() const { return format == "json"; }
};

json header(const Globals &g, const std::string &command, Signature sig) {
  return {{"schema_version", kSchemaVersion},
          {"command", command},
          {"signature", {sig.p, sig.q}},
          {"hbar", g.hbar}};
}

Rational rational_arg(const std::string &text, const char *name) {
  try {
    return parse_rational(text);
  } catch (const std::exception &) {
    throw usage_error(std::string(name) + ": not a rational number: '" + text + "'");
  }
}

SuperSymbol symbol_arg(const std::string &text, Signature sig, const Globals &g) {
  SuperSymbol s = parse_symbol(text, sig);
  return g.hbar == "formal" ? s : s.specialize_hbar(1);
}

int max_xi_degree(const SuperSymbol &s) {
  auto d = degrees(s).xi_degrees;
  return d.empty() ? 0 : *std::max_element(d.begin(), d.end());
}

std::string failure_name(Failure f) { return f == Failure::Existence ? "existence" : "uniqueness"; }

void print(std::ostream &out, const Globals &g, const json &j, const std::string &text) {
  if (g.as_json())
    out << j.dump(2) << "\n";
  else
    out << text;
}

// ---- commands

int cmd_bracket(const Globals &g, const std::string &a, const std::string &b, std::ostream &out) {
  const Signature sig = g.signature();
  SuperSymbol r = superbracket(symbol_arg(a, sig, g), symbol_arg(b, sig, g), g.convention());
  json j = header(g, "bracket", sig);
  j["a"] = a;
  j["b"] = b;
  j["result"] = r.str();
  print(out, g, j, r.str() + "\n");
  return Ok;
}

int cmd_quantize(const Globals &g, const std::string &lambda, const std::string &mu, const std::string &expr,
                 std::ostream &out) {
  const Signature sig = g.signature();
  const Rational lam = rational_arg(lambda, "--lambda"), m = rational_arg(mu, "--mu");
  SuperSymbol s = symbol_arg(expr, sig, g);
  // formal delta: corrections vanishing on s are skipped, so s may sit at a resonance of its block
  auto map = build_quantization(sig, Affine::constant(lam), Affine::formal(), std::max(degrees(s).p_degree, 0),
                                max_xi_degree(s), g.convention());
  SpinorOperator D = apply_quantization(map, s, Scalar(m - lam));
  json j = header(g, "quantize", sig);
  j["expr"] = s.str();
  j["lambda"] = to_string(lam);
  j["mu"] = to_string(m);
  j["result"] = D.str();
  print(out, g, j, D.str() + "\n");
  return Ok;
}

int cmd_superize(const Globals &g, const std::string &delta, const std::string &expr, std::ostream &out) {
  const Signature sig = g.signature();
  const Rational d = rational_arg(delta, "--delta");
  SuperSymbol s = symbol_arg(expr, sig, g);
  auto map = build_superization(sig, Affine::formal(), std::max(degrees(s).p_degree, 0), max_xi_degree(s),
                                g.convention());
  SuperSymbol r = apply_superization(map, s, Scalar(d));
  json j = header(g, "superize", sig);
  j["expr"] = s.str();
  j["delta"] = to_string(d);
  j["result"] = r.str();
  print(out, g, j, r.str() + "\n");
  return Ok;
}

int cmd_resonances(const Globals &g, const std::string &kind, const std::string &lambda, std::ostream &out) {
  const Signature sig = g.signature();
  if (kind != "S" && kind != "Q")
    throw usage_error("--kind must be S or Q");
  const MapKind k = kind == "S" ? MapKind::Superization : MapKind::Quantization;
  const Rational lam = rational_arg(lambda, "--lambda");
  auto rs = resonances(sig, k, g.max_deg, -1, Affine::constant(lam));
  json j = header(g, "resonances", sig);
  j["kind"] = kind;
  j["max_deg"] = g.max_deg;
  if (k == MapKind::Quantization)
    j["lambda"] = to_string(lam);
  j["resonances"] = json::array();
  std::string text;
  for (const auto &r : rs) {
    j["resonances"].push_back(
        {{"delta", to_string(r.delta)}, {"failure", failure_name(r.failure)}, {"block", {r.k, r.kappa}}});
    text += to_string(r.delta) + " " + failure_name(r.failure) + " (" + std::to_string(r.k) + "," +
            std::to_string(r.kappa) + ")\n";
  }
  if (rs.empty())
    text = "none\n";
  print(out, g, j, text);
  return Ok;
}

int cmd_invariants(const Globals &g, const std::string &module, std::ostream &out) {
  const Signature sig = g.signature();
  ModuleKind kind;
  if (module == "T")
    kind = ModuleKind::TensorSymbols;
  else if (module == "S")
    kind = ModuleKind::HamiltonianSymbols;
  else if (module == "D")
    kind = ModuleKind::SpinorOperators;
  else
    throw usage_error("--module must be T, S or D");
  auto inv = invariant_scan(sig, kind, g.max_deg);
  json j = header(g, "invariants", sig);
  j["module"] = module;
  j["max_deg"] = g.max_deg;
  j["invariants"] = json::array();
  std::string text;
  for (const auto &v : inv) {
    json e = {{"k", v.k}, {"pseudo", v.pseudo}};
    if (v.kappa >= 0)
      e["kappa"] = v.kappa;
    if (kind == ModuleKind::SpinorOperators) {
      e["lambda"] = to_string(v.lambda);
      e["mu"] = to_string(v.mu);
      e["element"] = SpinorOperator(sig, v.element).str();
    } else {
      e["delta"] = to_string(v.delta);
      e["element"] = render_terms(v.element);
    }
    j["invariants"].push_back(e);
    text += v.str() + "\n";
  }
  print(out, g, j, text);
  return Ok;
}

// "12:x3" or "1,2:x3" -> indices and coefficient
std::pair<std::vector<int>, SuperSymbol> component_arg(const std::string &text, Signature sig, const Globals &g) {
  auto colon = text.find(':');
  if (colon == std::string::npos)
    throw usage_error("--form components look like 12:x3");
  std::vector<int> idx;
  for (char c : text.substr(0, colon)) {
    if (c == ',' || c == ' ')
      continue;
    if (c < '1' || c > '9' || c - '0' > sig.n())
      throw usage_error("--form: bad index '" + std::string(1, c) + "' in '" + text + "'");
    idx.push_back(c - '1');
  }
  return {idx, symbol_arg(text.substr(colon + 1), sig, g)};
}

int cmd_ky(const Globals &g, const std::vector<std::string> &components, int degree, std::ostream &out) {
  const Signature sig = g.signature();
  json j = header(g, "ky-check", sig);
  if (components.empty()) {
    if (degree < 1 || degree > sig.n())
      throw usage_error("ky-check needs --form components or --degree in 1..n");
    auto c = compare_ky(sig, degree, g.max_deg);
    j["degree"] = degree;
    j["max_deg"] = g.max_deg;
    j["ansatz_dim"] = c.ansatz_dim;
    j["killing_yano"] = {{"pde", c.ky_dim_pde}, {"bracket", c.ky_dim_bracket}, {"agree", c.ky_agree}};
    j["conformal"] = {{"pde", c.cky_dim_pde}, {"bracket", c.cky_dim_bracket}, {"agree", c.cky_agree}};
    j["forms_checked"] = c.forms_checked;
    j["forms_agreeing"] = c.forms_agreeing;
    auto names = [](const std::vector<SkewForm> &fs) {
      json a = json::array();
      for (const auto &f : fs)
        a.push_back(f.str());
      return a;
    };
    j["witnesses"] = {{"killing_yano", names(c.ky_witness)},
                      {"conformal", names(c.cky_witness)},
                      {"neither", names(c.neither_witness)}};
    j["agree"] = c.ok();
    std::string text = "ansatz " + std::to_string(c.ansatz_dim) + "\n";
    text += "killing-yano: pde " + std::to_string(c.ky_dim_pde) + ", bracket " + std::to_string(c.ky_dim_bracket) +
            (c.ky_agree ? ", same space\n" : ", DIFFERENT\n");
    text += "conformal: pde " + std::to_string(c.cky_dim_pde) + ", bracket " + std::to_string(c.cky_dim_bracket) +
            (c.cky_agree ? ", same space\n" : ", DIFFERENT\n");
    text += "forms " + std::to_string(c.forms_agreeing) + "/" + std::to_string(c.forms_checked) + " agree\n";
    for (const auto &f : c.ky_witness)
      text += "  killing-yano: " + f.str() + "\n";
    for (const auto &f : c.cky_witness)
      text += "  conformal: " + f.str() + "\n";
    for (const auto &f : c.neither_witness)
      text += "  neither: " + f.str() + "\n";
    print(out, g, j, text);
    return Ok;
  }
  std::optional<SkewForm> f;
  for (const auto &text : components) {
    auto [idx, v] = component_arg(text, sig, g);
    if (!f)
      f.emplace(sig, static_cast<int>(idx.size()));
    if (static_cast<int>(idx.size()) != f->degree())
      throw usage_error("--form components of different degrees");
    std::vector<int> sorted = idx;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw usage_error("--form: repeated index in '" + text + "'");
    SuperSymbol cur = f->component(idx);
    f->set(idx, cur + v);
  }
  if (f->degree() == 0)
    throw usage_error("--form: 0-forms have no symbol");
  KYClass pde = ky_pde_oracle(*f), br = ky_bracket_test(*f);
  j["form"] = f->str();
  j["symbol"] = symbol_of_form(*f).str();
  j["pde"] = to_string(pde);
  j["bracket"] = to_string(br);
  j["agree"] = pde == br;
  print(out, g, j,
        "form " + f->str() + "\nsymbol " + symbol_of_form(*f).str() + "\npde: " + to_string(pde) +
            "\nbracket: " + to_string(br) + "\n");
  return Ok;
}

int cmd_dirac(const Globals &g, std::ostream &out) {
  const Signature sig = g.signature();
  SpinorOperator D = dirac(sig);
  bool invariant = true;
  for (const auto &X : generators(sig))
    invariant = invariant && adjoint_action(X, D).is_zero();
  SpinorOperator sq(sig, compose_terms(sig, D.terms(), D.terms()));
  json j = header(g, "dirac", sig);
  j["operator"] = D.str();
  j["lambda"] = to_string(D.lambda());
  j["mu"] = to_string(D.mu());
  j["invariant"] = invariant;
  j["square"] = sq.str();
  print(out, g, j,
        D.str() + "\nweights (" + to_string(D.lambda()) + ", " + to_string(D.mu()) + ")\ninvariant " +
            (invariant ? "yes" : "no") + "\nsquare " + sq.str() + "\n");
  return Ok;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Exact conformally equivariant superization and quantization on flat spin phase space",
               "spinquant"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--n", g.n, "dimension, Euclidean signature unless --pq is given")->check(CLI::Range(1, kMaxDim));
  app.add_option("--pq", g.pq, "signature p,q");
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--max-deg", g.max_deg, "p-degree bound")->check(CLI::Range(0, 6));
  app.add_option("--hbar", g.hbar, "hbar = 1 or kept formal")->check(CLI::IsMember({"1", "formal"}));

  std::string a, b, lambda = "0", mu, delta, expr, kind, module;
  std::vector<std::string> form;
  int degree = 0;
  auto *bracket = app.add_subcommand("bracket", "Poisson superbracket {A, B}");
  bracket->add_option("A", a)->required();
  bracket->add_option("B", b)->required();
  auto *quantize = app.add_subcommand("quantize", "equivariant quantization of a symbol");
  quantize->add_option("--lambda", lambda)->required();
  quantize->add_option("--mu", mu)->required();
  quantize->add_option("--expr", expr)->required();
  auto *superize = app.add_subcommand("superize", "equivariant superization of a symbol");
  superize->add_option("--delta", delta)->required();
  superize->add_option("--expr", expr)->required();
  auto *reson = app.add_subcommand("resonances", "resonant values of delta up to --max-deg");
  reson->add_option("--kind", kind, "S or Q")->required();
  reson->add_option("--lambda", lambda, "fixed lambda for Q");
  auto *invs = app.add_subcommand("invariants", "x-free invariants up to --max-deg");
  invs->add_option("--module", module, "T, S or D")->required();
  auto *ky = app.add_subcommand("ky-check", "Killing-Yano test of a form, or of all forms of a degree");
  ky->add_option("--form", form, "component like 12:x3, repeatable");
  ky->add_option("--degree", degree, "compare both methods on all forms with coefficients of degree <= --max-deg");
  auto *dir = app.add_subcommand("dirac", "Dirac operator, its weights, invariance and square");
  for (auto *s : {bracket, quantize, superize, reson, invs, ky, dir})
    s->fallthrough();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e, out, err);
    return code == 0 ? Ok : Usage;
  }

  try {
    if (*bracket)
      return cmd_bracket(g, a, b, out);
    if (*quantize)
      return cmd_quantize(g, lambda, mu, expr, out);
    if (*superize)
      return cmd_superize(g, delta, expr, out);
    if (*reson)
      return cmd_resonances(g, kind, lambda, out);
    if (*invs)
      return cmd_invariants(g, module, out);
    if (*ky)
      return cmd_ky(g, form, degree, out);
    if (*dir)
      return cmd_dirac(g, out);
  } catch (const unavailable_error &e) {
    err << "unavailable: " << e.what() << "\n";
    return Unavailable;
  } catch (const parse_error &e) {
    err << "error: " << e.what() << "\n";
    return Usage;
  } catch (const std::invalid_argument &e) {
    err << "error: " << e.what() << "\n";
    return Usage;
  } catch (const std::out_of_range &e) {
    err << "error: " << e.what() << "\n";
    return Usage;
  }
  return Usage;
}

} // namespace spinq::cli
