#include "rmdp/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rmdp {

using nlohmann::ordered_json;

namespace {

const ordered_json& field(const ordered_json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(std::string("missing key '") + key + "'");
    return *it;
}

std::size_t read_count(const ordered_json& j, const char* key) {
    if (!j.is_number_integer() || j.get<long long>() <= 0)
        throw ParseError(std::string("'") + key + "' must be a positive integer");
    return j.get<std::size_t>();
}

double read_number(const ordered_json& j, const std::string& where) {
    if (!j.is_number()) throw ParseError(where + " must be a number");
    return j.get<double>();
}

void read_vector(const ordered_json& j, std::size_t n, const std::string& where, double* out) {
    if (!j.is_array() || j.size() != n)
        throw ParseError(where + " must be an array of " + std::to_string(n) + " numbers");
    for (std::size_t i = 0; i < n; ++i)
        out[i] = read_number(j[i], where + "[" + std::to_string(i) + "]");
}

void read_matrix(const ordered_json& j, std::size_t rows, std::size_t cols, const std::string& where,
                 double* out) {
    if (!j.is_array() || j.size() != rows)
        throw ParseError(where + " must have " + std::to_string(rows) + " rows");
    for (std::size_t r = 0; r < rows; ++r)
        read_vector(j[r], cols, where + "[" + std::to_string(r) + "]", out + r * cols);
}

numvec read_radii(const ordered_json& j, Rect rect, std::size_t S, std::size_t A,
                  const std::string& where) {
    const std::size_t n = rect == Rect::sa ? S * A : S;
    if (j.is_number()) return numvec(n, j.get<double>());
    numvec out(n);
    if (rect == Rect::sa) read_matrix(j, S, A, where, out.data());
    else read_vector(j, S, where, out.data());
    return out;
}

void reject_unknown(const ordered_json& obj, std::initializer_list<const char*> known,
                    const std::string& where) {
    for (const auto& [key, val] : obj.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ParseError("unknown key '" + key + "' in " + where);
    }
}

UncertaintySpec read_uncertainty(const ordered_json& j, std::size_t S, std::size_t A) {
    if (!j.is_object()) throw ParseError("'uncertainty' must be an object");
    reject_unknown(j, {"rect", "p", "alpha", "beta"}, "uncertainty");
    const auto& rect_j = field(j, "rect");
    if (!rect_j.is_string()) throw ParseError("'rect' must be a string");
    UncertaintySpec u;
    try {
        u.rect = parse_rect(rect_j.get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
    if (j.contains("p")) {
        const auto& p = j["p"];
        try {
            if (p.is_string()) u.p = NormParam::parse(p.get<std::string>());
            else u.p = NormParam(read_number(p, "'p'"));
        } catch (const std::invalid_argument& e) {
            throw ParseError(e.what());
        }
    } else if (u.rect != Rect::none) {
        throw ParseError("missing key 'p'");
    }
    if (u.rect == Rect::none) {
        if (j.contains("alpha") || j.contains("beta"))
            throw ParseError("rect none takes no radii");
        return u;
    }
    u.alpha = read_radii(field(j, "alpha"), u.rect, S, A, "alpha");
    u.beta = read_radii(field(j, "beta"), u.rect, S, A, "beta");
    return u;
}

ordered_json matrix(const numvec& x, std::size_t rows, std::size_t cols) {
    ordered_json out = ordered_json::array();
    for (std::size_t r = 0; r < rows; ++r)
        out.push_back(std::vector<double>(x.begin() + std::ptrdiff_t(r * cols),
                                          x.begin() + std::ptrdiff_t((r + 1) * cols)));
    return out;
}

ordered_json norm_json(NormParam p) {
    if (p.is_inf()) return "inf";
    return p.value();
}

} // namespace

MdpDocument parse_mdp_document(std::string_view text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("document must be a JSON object");
    reject_unknown(j, {"num_states", "num_actions", "gamma", "reward", "kernel", "mu", "uncertainty"},
                   "document");

    const std::size_t S = read_count(field(j, "num_states"), "num_states");
    const std::size_t A = read_count(field(j, "num_actions"), "num_actions");
    MdpDocument doc;
    Mdp& m = doc.mdp;
    m = Mdp(S, A, read_number(field(j, "gamma"), "'gamma'"));
    read_matrix(field(j, "reward"), S, A, "reward", m.reward.data());

    const auto& k = field(j, "kernel");
    if (!k.is_array() || k.size() != S) throw ParseError("kernel must have " + std::to_string(S) + " entries");
    for (std::size_t s = 0; s < S; ++s)
        read_matrix(k[s], A, S, "kernel[" + std::to_string(s) + "]", m.kernel.data() + s * A * S);

    if (j.contains("mu")) read_vector(j["mu"], S, "mu", m.mu.data());
    if (j.contains("uncertainty")) doc.uncertainty = read_uncertainty(j["uncertainty"], S, A);
    return doc;
}

MdpDocument load_mdp_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_mdp_document(buf.str());
}

std::string dump_mdp_document(const MdpDocument& doc) {
    const Mdp& m = doc.mdp;
    const std::size_t S = m.num_states, A = m.num_actions;
    check_shapes(m);
    ordered_json j;
    j["num_states"] = S;
    j["num_actions"] = A;
    j["gamma"] = m.gamma;
    j["reward"] = matrix(m.reward, S, A);
    ordered_json kernel = ordered_json::array();
    for (std::size_t s = 0; s < S; ++s) {
        numvec block(m.kernel.begin() + std::ptrdiff_t(s * A * S),
                     m.kernel.begin() + std::ptrdiff_t((s + 1) * A * S));
        kernel.push_back(matrix(block, A, S));
    }
    j["kernel"] = std::move(kernel);
    j["mu"] = m.mu;

    const UncertaintySpec& u = doc.uncertainty;
    ordered_json uj;
    uj["rect"] = to_string(u.rect);
    if (u.rect != Rect::none) uj["p"] = norm_json(u.p);
    if (u.rect == Rect::sa) {
        uj["alpha"] = matrix(u.alpha, S, A);
        uj["beta"] = matrix(u.beta, S, A);
    } else if (u.rect == Rect::s) {
        uj["alpha"] = u.alpha;
        uj["beta"] = u.beta;
    }
    j["uncertainty"] = std::move(uj);
    return j.dump(2) + "\n";
}

std::string solve_report(const SolveResult& res, const MdpDocument& doc,
                         const std::optional<PropertyReport>& properties) {
    const std::size_t S = doc.mdp.num_states, A = doc.mdp.num_actions;
    ordered_json j;
    j["rect"] = to_string(doc.uncertainty.rect);
    if (doc.uncertainty.rect != Rect::none) j["p"] = norm_json(doc.uncertainty.p);
    j["converged"] = res.converged;
    j["sweeps"] = res.sweeps;
    j["final_residual"] = res.final_residual;
    j["threshold"] = res.threshold;
    j["value"] = res.value;
    j["policy"] = matrix(res.policy.probs.data(), S, A);
    j["support_size"] = res.policy.support_size;
    j["chi"] = res.chi;
    if (properties) {
        j["properties_pass"] = properties->all_pass;
        ordered_json rows = ordered_json::array();
        for (const auto& d : properties->states) {
            ordered_json r;
            r["chi_recount"] = d.chi_recount;
            r["upper_slack"] = d.upper_slack;
            if (std::isnan(d.lower_slack)) r["lower_slack"] = nullptr;
            else r["lower_slack"] = d.lower_slack;
            r["pass"] = d.pass;
            rows.push_back(std::move(r));
        }
        j["properties"] = std::move(rows);
    }
    return j.dump(2) + "\n";
}

} // namespace rmdp
