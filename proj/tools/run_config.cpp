#include "run_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "qpgrating/experiments.hpp"
#include "qpgrating/oracle_flat.hpp"

namespace qpg::cli {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw config_error(path + ": expected an object");
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key)) throw config_error(path + ": unknown key '" + key + "'");
}

double number(const json& v, const std::string& path) {
    if (!v.is_number()) throw config_error(path + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw config_error(path + ": must be finite");
    return x;
}

double positive(const json& v, const std::string& path) {
    const double x = number(v, path);
    if (!(x > 0.0)) throw config_error(path + ": must be positive");
    return x;
}

int integer(const json& v, const std::string& path, int lo) {
    if (!v.is_number_integer()) throw config_error(path + ": expected an integer");
    const long long x = v.get<long long>();
    if (x < lo || x > 1000000) throw config_error(path + ": must be an integer >= " + std::to_string(lo));
    return static_cast<int>(x);
}

std::vector<int> int_list(const json& v, const std::string& path, int lo) {
    std::vector<int> out;
    if (v.is_array()) {
        if (v.empty()) throw config_error(path + ": empty list");
        for (std::size_t i = 0; i < v.size(); ++i) out.push_back(integer(v[i], path + "[" + std::to_string(i) + "]", lo));
    } else {
        out.push_back(integer(v, path, lo));
    }
    return out;
}

std::string string(const json& v, const std::string& path) {
    if (!v.is_string()) throw config_error(path + ": expected a string");
    return v.get<std::string>();
}

void parse_wave(const json& w, double& k0, double& alpha, bool& has_k0) {
    check_keys(w, "wave", {"k0", "alpha"});
    if (w.contains("k0")) {
        k0 = positive(w["k0"], "wave.k0");
        has_k0 = true;
    }
    if (w.contains("alpha")) {
        alpha = number(w["alpha"], "wave.alpha");
        if (std::abs(alpha) >= pi / 2) throw config_error("wave.alpha: must lie in (-pi/2, pi/2)");
    }
}

MediumStack builtin_stack(const json& s, const std::string& name) {
    if (name == "table1") {
        check_keys(s, "stack", {"builtin", "row"});
        const int row = s.contains("row") ? integer(s["row"], "stack.row", 1) : 1;
        if (row > 2) throw config_error("stack.row: must be 1 or 2");
        return table1_stack(1.0, row);
    }
    if (name == "ghost") {
        check_keys(s, "stack", {"builtin", "ghosts"});
        const int g = s.contains("ghosts") ? integer(s["ghosts"], "stack.ghosts", 1) : 1;
        if (g > 3) throw config_error("stack.ghosts: must be 1, 2 or 3");
        return ghost_configuration(g);
    }
    if (name == "regularity") {
        check_keys(s, "stack", {"builtin", "p", "a", "b"});
        const int p = s.contains("p") ? integer(s["p"], "stack.p", 2) : 3;
        if (p != 2 && p % 2 == 0) throw config_error("stack.p: must be 2 or odd");
        const double a = s.contains("a") ? number(s["a"], "stack.a") : 1.0;
        const double b = s.contains("b") ? number(s["b"], "stack.b") : -2.0;
        return regularity_family(a, b, p);
    }
    if (name == "flat") {
        check_keys(s, "stack", {"builtin", "eta1", "b"});
        FlatBase fb;
        if (s.contains("eta1")) fb.eta1 = positive(s["eta1"], "stack.eta1");
        if (s.contains("b")) fb.b = number(s["b"], "stack.b");
        return flat_stack(fb, std::abs(fb.b) + 3.0);
    }
    throw config_error("stack.builtin: unknown builtin '" + name + "' (table1, ghost, regularity, flat)");
}

MediumStack explicit_stack(const json& s) {
    check_keys(s, "stack", {"interfaces", "eta", "H"});
    for (const char* k : {"interfaces", "eta", "H"})
        if (!s.contains(k)) throw config_error(std::string("stack.") + k + ": required");
    MediumStack st;
    const json& ifs = s["interfaces"];
    if (!ifs.is_array() || ifs.empty()) throw config_error("stack.interfaces: expected a non-empty list");
    for (std::size_t i = 0; i < ifs.size(); ++i) {
        const std::string p = "stack.interfaces[" + std::to_string(i) + "]";
        check_keys(ifs[i], p, {"shape", "params"});
        if (!ifs[i].contains("shape") || !ifs[i].contains("params")) throw config_error(p + ": needs shape and params");
        BuiltinShape b;
        b.name = string(ifs[i]["shape"], p + ".shape");
        const json& pr = ifs[i]["params"];
        if (!pr.is_array()) throw config_error(p + ".params: expected a list");
        for (std::size_t q = 0; q < pr.size(); ++q) b.params.push_back(number(pr[q], p + ".params[" + std::to_string(q) + "]"));
        try {
            st.interfaces.push_back(make_builtin_interface(b));
        } catch (const Error& e) {
            throw config_error(p + ": " + e.what());
        }
    }
    const json& eta = s["eta"];
    if (!eta.is_array()) throw config_error("stack.eta: expected a list");
    for (std::size_t i = 0; i < eta.size(); ++i) st.eta.push_back(positive(eta[i], "stack.eta[" + std::to_string(i) + "]"));
    if (st.eta.size() != st.interfaces.size() + 1)
        throw config_error("stack.eta: needs one value per medium (" + std::to_string(st.interfaces.size() + 1) + ")");
    if (st.eta[0] != 1.0) throw config_error("stack.eta[0]: the upper medium must have eta = 1");
    st.H = positive(s["H"], "stack.H");
    return st;
}

void parse_discretization(const json& d, RunConfig& rc) {
    check_keys(d, "discretization", {"N", "N_list", "N_prime", "images", "window", "log_band", "min_samples",
                                     "wood_tolerance", "overkill_extra", "N_exact"});
    if (d.contains("N")) rc.N = int_list(d["N"], "discretization.N", 1);
    if (d.contains("N_list")) rc.N_list = int_list(d["N_list"], "discretization.N_list", 1);
    if (d.contains("images")) {
        const std::string k = string(d["images"], "discretization.images");
        if (k == "expansion")
            rc.assembly.images.kind = ImageMethod::Kind::expansion;
        else if (k == "direct")
            rc.assembly.images.kind = ImageMethod::Kind::direct;
        else
            throw config_error("discretization.images: expansion or direct");
    }
    if (d.contains("N_prime")) rc.assembly.images.direct_terms = integer(d["N_prime"], "discretization.N_prime", 1);
    if (d.contains("window")) {
        const json& w = d["window"];
        check_keys(w, "discretization.window", {"kind", "eps", "order"});
        if (w.contains("kind")) {
            const std::string k = string(w["kind"], "discretization.window.kind");
            if (k == "trig")
                rc.assembly.window.kind = CutoffWindow::Kind::trig;
            else if (k == "bump")
                rc.assembly.window.kind = CutoffWindow::Kind::bump;
            else
                throw config_error("discretization.window.kind: trig or bump");
        }
        if (w.contains("eps")) {
            rc.assembly.window.eps = positive(w["eps"], "discretization.window.eps");
            if (rc.assembly.window.eps > pi) throw config_error("discretization.window.eps: must not exceed pi");
        }
        if (w.contains("order")) rc.assembly.window.order = integer(w["order"], "discretization.window.order", 1);
    }
    if (d.contains("log_band")) rc.assembly.log_band = integer(d["log_band"], "discretization.log_band", 1);
    if (d.contains("min_samples")) rc.assembly.min_samples = integer(d["min_samples"], "discretization.min_samples", 0);
    if (d.contains("wood_tolerance"))
        rc.assembly.wood_tolerance = positive(d["wood_tolerance"], "discretization.wood_tolerance");
    if (d.contains("overkill_extra")) rc.overkill_extra = integer(d["overkill_extra"], "discretization.overkill_extra", 1);
    if (d.contains("N_exact")) rc.N_exact = integer(d["N_exact"], "discretization.N_exact", 1);
}

}  // namespace

RunConfig parse_config(const json& doc) {
    check_keys(doc, "config", {"schema_version", "recipe", "stack", "wave", "discretization", "greens_check",
                               "field_grid", "tolerance", "seed", "output", "max_dimension"});
    if (!doc.contains("schema_version")) throw config_error("schema_version: required");
    if (integer(doc["schema_version"], "schema_version", 0) != schema_version)
        throw config_error("schema_version: unsupported (expected " + std::to_string(schema_version) + ")");
    RunConfig rc;
    rc.echo = doc;
    if (doc.contains("recipe")) {
        rc.recipe = string(doc["recipe"], "recipe");
        if (std::find(recipes().begin(), recipes().end(), rc.recipe) == recipes().end())
            throw config_error("recipe: unknown recipe '" + rc.recipe + "'");
    }

    double k0 = 1.0, alpha = 0.47;
    bool has_k0 = false;
    if (doc.contains("wave")) parse_wave(doc["wave"], k0, alpha, has_k0);
    if (doc.contains("stack")) {
        const json& s = doc["stack"];
        if (!s.is_object()) throw config_error("stack: expected an object");
        if (s.contains("builtin")) {
            rc.stack_builtin = string(s["builtin"], "stack.builtin");
            rc.stack = builtin_stack(s, rc.stack_builtin);
            if (rc.stack_builtin == "table1" && !has_k0) throw config_error("wave.k0: required for the table1 stack");
        } else {
            rc.stack = explicit_stack(s);
            if (!has_k0) throw config_error("wave.k0: required");
        }
        rc.stack.k0 = k0;
        rc.stack.alpha = alpha;
        const auto v = validate_stack(rc.stack);
        if (!v.empty())
            throw config_error("stack: invariant '" + v.front().invariant + "' violated on interface " +
                               std::to_string(v.front().interface) + ": " + v.front().detail);
    } else if (doc.contains("wave")) {
        throw config_error("wave: given without a stack");
    }
    if (doc.contains("discretization")) parse_discretization(doc["discretization"], rc);
    if (!rc.stack.interfaces.empty() && rc.N.size() > 1 && static_cast<int>(rc.N.size()) != rc.stack.M())
        throw config_error("discretization.N: needs one value or one per interface");

    if (doc.contains("greens_check")) {
        const json& g = doc["greens_check"];
        check_keys(g, "greens_check", {"pairs", "N_prime", "J"});
        if (g.contains("pairs")) rc.greens.pairs = integer(g["pairs"], "greens_check.pairs", 1);
        if (g.contains("N_prime")) rc.greens.n_prime = integer(g["N_prime"], "greens_check.N_prime", 1);
        if (g.contains("J")) rc.greens.J = integer(g["J"], "greens_check.J", 1);
    }
    if (doc.contains("field_grid")) {
        const json& g = doc["field_grid"];
        check_keys(g, "field_grid", {"x1", "x2", "total"});
        auto axis = [&](const char* key, double& lo, double& hi, int& n) {
            const std::string p = std::string("field_grid.") + key;
            if (!g.contains(key)) return;
            const json& a = g[key];
            if (!a.is_array() || a.size() != 3) throw config_error(p + ": expected [min, max, points]");
            lo = number(a[0], p + "[0]");
            hi = number(a[1], p + "[1]");
            n = integer(a[2], p + "[2]", 1);
            if (!(hi >= lo)) throw config_error(p + ": max below min");
        };
        axis("x1", rc.grid.x1_min, rc.grid.x1_max, rc.grid.n1);
        axis("x2", rc.grid.x2_min, rc.grid.x2_max, rc.grid.n2);
        if (g.contains("total")) {
            if (!g["total"].is_boolean()) throw config_error("field_grid.total: expected a boolean");
            rc.grid.total = g["total"].get<bool>();
        }
    }
    if (doc.contains("tolerance")) rc.tolerance = positive(doc["tolerance"], "tolerance");
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) throw config_error("seed: expected a non-negative integer");
        rc.seed = doc["seed"].get<unsigned>();
    }
    if (doc.contains("output")) rc.output = string(doc["output"], "output");
    if (doc.contains("max_dimension")) rc.max_dimension = integer(doc["max_dimension"], "max_dimension", 1);
    return rc;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw config_error("malformed config '" + path + "': " + e.what());
    }
    return parse_config(doc);
}

}  // namespace qpg::cli
