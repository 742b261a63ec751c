#include "svc/scenario_io.hpp"

#include "svc/cases.hpp"
#include "svc/errors.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <string_view>

namespace svc {

using nlohmann::json;

namespace {

std::string child(const std::string& ptr, const std::string& key) { return ptr + "/" + key; }
std::string child(const std::string& ptr, std::size_t i) { return ptr + "/" + std::to_string(i); }

class Reader {
public:
    double number(const json& j, const std::string& ptr) const {
        if (!j.is_number())
            throw ValidationError(ptr, "expected a number");
        return j.get<double>();
    }

    std::size_t index(const json& j, const std::string& ptr) const {
        if (!j.is_number_integer() || j.get<long long>() < 0)
            throw ValidationError(ptr, "expected a non-negative integer");
        return j.get<std::size_t>();
    }

    bool boolean(const json& j, const std::string& ptr) const {
        if (!j.is_boolean())
            throw ValidationError(ptr, "expected true or false");
        return j.get<bool>();
    }

    std::string string(const json& j, const std::string& ptr) const {
        if (!j.is_string())
            throw ValidationError(ptr, "expected a string");
        return j.get<std::string>();
    }

    const json& object(const json& j, const std::string& ptr, std::initializer_list<const char*> keys) const {
        if (!j.is_object())
            throw ValidationError(ptr, "expected an object");
        for (const auto& [k, v] : j.items()) {
            if (std::find_if(keys.begin(), keys.end(), [&](const char* key) { return k == key; }) == keys.end())
                throw ValidationError(child(ptr, k), "unknown key");
        }
        return j;
    }

    const json& array(const json& j, const std::string& ptr) const {
        if (!j.is_array())
            throw ValidationError(ptr, "expected an array");
        return j;
    }

    std::vector<double> numbers(const json& j, const std::string& ptr) const {
        std::vector<double> out;
        for (std::size_t i = 0; i < array(j, ptr).size(); ++i)
            out.push_back(number(j[i], child(ptr, i)));
        return out;
    }

    std::vector<bool> booleans(const json& j, const std::string& ptr) const {
        std::vector<bool> out;
        for (std::size_t i = 0; i < array(j, ptr).size(); ++i)
            out.push_back(boolean(j[i], child(ptr, i)));
        return out;
    }

    template <class F>
    void optional(const json& obj, const char* key, const std::string& ptr, F&& f) const {
        if (const auto it = obj.find(key); it != obj.end())
            f(*it, child(ptr, key));
    }

    SensitivityModel model(const json& j, const std::string& ptr) const {
        object(j, ptr, {"c_v", "c_q"});
        if (!j.contains("c_v"))
            throw ValidationError(child(ptr, "c_v"), "missing");
        if (!j.contains("c_q"))
            throw ValidationError(child(ptr, "c_q"), "missing");
        const auto c_v = numbers(j["c_v"], child(ptr, "c_v"));
        const std::string q_ptr = child(ptr, "c_q");
        const json& rows = array(j["c_q"], q_ptr);
        if (rows.size() != c_v.size())
            throw ValidationError(q_ptr, "expected " + std::to_string(c_v.size()) + " rows");
        Vector v(static_cast<Eigen::Index>(c_v.size()));
        Matrix q(v.size(), v.size());
        for (std::size_t i = 0; i < c_v.size(); ++i) {
            v[static_cast<Eigen::Index>(i)] = c_v[i];
            const auto row = numbers(rows[i], child(q_ptr, i));
            if (row.size() != c_v.size())
                throw ValidationError(child(q_ptr, i), "expected " + std::to_string(c_v.size()) + " columns");
            for (std::size_t k = 0; k < row.size(); ++k)
                q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k];
        }
        if (c_v.empty())
            throw ValidationError(child(ptr, "c_v"), "must not be empty");
        try {
            return SensitivityModel(std::move(v), std::move(q));
        } catch (const Error& e) {
            throw ValidationError(q_ptr, e.what());
        }
    }

    DtipGains gains(const json& j, const std::string& ptr) const {
        object(j, ptr, {"alpha", "k_p", "h_d"});
        DtipGains g;
        optional(j, "alpha", ptr, [&](const json& v, const std::string& p) { g.alpha = number(v, p); });
        optional(j, "k_p", ptr, [&](const json& v, const std::string& p) { g.k_p = number(v, p); });
        optional(j, "h_d", ptr, [&](const json& v, const std::string& p) { g.h_d = index(v, p); });
        return g;
    }

    DifferentiatorConfig differentiator(const json& j, const std::string& ptr, DifferentiatorConfig d) const {
        object(j, ptr, {"t_ndf", "n_ndf"});
        optional(j, "t_ndf", ptr, [&](const json& v, const std::string& p) { d.t_ndf = number(v, p); });
        optional(j, "n_ndf", ptr, [&](const json& v, const std::string& p) { d.n_ndf = index(v, p); });
        return d;
    }

    GeneratorSpec generator(const json& j, const std::string& ptr) const {
        object(j, ptr, {"tau_avr", "v_base", "v_min", "v_max"});
        GeneratorSpec g;
        optional(j, "tau_avr", ptr, [&](const json& v, const std::string& p) { g.tau_avr = number(v, p); });
        optional(j, "v_base", ptr, [&](const json& v, const std::string& p) {
            if (v.is_string() && v.get<std::string>() == "auto")
                g.v_base.reset();
            else if (v.is_number())
                g.v_base = v.get<double>();
            else
                throw ValidationError(p, "expected a number or \"auto\"");
        });
        optional(j, "v_min", ptr, [&](const json& v, const std::string& p) { g.v_min = number(v, p); });
        optional(j, "v_max", ptr, [&](const json& v, const std::string& p) { g.v_max = number(v, p); });
        return g;
    }

    Event event(const json& j, const std::string& ptr) const {
        if (!j.is_object())
            throw ValidationError(ptr, "expected an object");
        if (!j.contains("at"))
            throw ValidationError(child(ptr, "at"), "missing");
        if (!j.contains("kind"))
            throw ValidationError(child(ptr, "kind"), "missing");
        Event ev;
        ev.at = number(j["at"], child(ptr, "at"));
        const std::string kind = string(j["kind"], child(ptr, "kind"));
        auto require = [&](const char* key) -> const json& {
            if (!j.contains(key))
                throw ValidationError(child(ptr, key), "missing");
            return j[key];
        };
        if (kind == "setpoint_step") {
            object(j, ptr, {"at", "kind", "v_pp_ref"});
            ev.kind = SetpointStep{number(require("v_pp_ref"), child(ptr, "v_pp_ref"))};
        } else if (kind == "set_delay") {
            object(j, ptr, {"at", "kind", "delay"});
            ev.kind = SetDelay{number(require("delay"), child(ptr, "delay"))};
        } else if (kind == "load_disturbance") {
            object(j, ptr, {"at", "kind", "d_v", "d_q"});
            LoadDisturbance d;
            optional(j, "d_v", ptr, [&](const json& v, const std::string& p) { d.d_v = number(v, p); });
            optional(j, "d_q", ptr, [&](const json& v, const std::string& p) { d.d_q = numbers(v, p); });
            ev.kind = d;
        } else if (kind == "line_perturb") {
            object(j, ptr, {"at", "kind", "gen", "factor", "model"});
            LinePerturb l;
            l.gen = index(require("gen"), child(ptr, "gen"));
            optional(j, "factor", ptr, [&](const json& v, const std::string& p) { l.factor = number(v, p); });
            optional(j, "model", ptr, [&](const json& v, const std::string& p) { l.model = model(v, p); });
            ev.kind = l;
        } else if (kind == "disconnect") {
            object(j, ptr, {"at", "kind", "gen"});
            ev.kind = Disconnect{index(require("gen"), child(ptr, "gen"))};
        } else if (kind == "join_svc") {
            object(j, ptr, {"at", "kind", "gen"});
            ev.kind = JoinSvc{index(require("gen"), child(ptr, "gen"))};
        } else if (kind == "leave_svc") {
            object(j, ptr, {"at", "kind", "gen"});
            ev.kind = LeaveSvc{index(require("gen"), child(ptr, "gen"))};
        } else {
            throw ValidationError(child(ptr, "kind"), "unknown event kind \"" + kind + "\"");
        }
        return ev;
    }

    Scenario scenario(const json& doc) const {
        const std::string root;
        object(doc, root,
               {"name", "duration", "v_pp_ref", "model", "participation", "generators", "initial_svc_active",
                "plant", "inner", "outer", "reference_derivative", "u2_distribution", "log_interval",
                "tolerances", "events"});
        if (!doc.contains("model"))
            throw ValidationError("/model", "missing");
        if (!doc.contains("participation"))
            throw ValidationError("/participation", "missing");
        SensitivityModel m = model(doc["model"], "/model");
        const std::size_t n = m.size();
        std::vector<double> pf_values = numbers(doc["participation"], "/participation");
        if (pf_values.size() != n)
            throw ValidationError("/participation", "expected " + std::to_string(n) + " entries");
        std::optional<ParticipationFactors> pf;
        try {
            pf.emplace(std::move(pf_values));
        } catch (const Error& e) {
            throw ValidationError("/participation", e.what());
        }

        Scenario s(std::move(m), *pf);
        optional(doc, "name", root, [&](const json& v, const std::string& p) { s.name = string(v, p); });
        optional(doc, "duration", root, [&](const json& v, const std::string& p) { s.duration = number(v, p); });
        optional(doc, "v_pp_ref", root, [&](const json& v, const std::string& p) { s.v_pp_ref = number(v, p); });

        s.generators.assign(n, GeneratorSpec{});
        optional(doc, "generators", root, [&](const json& v, const std::string& p) {
            if (array(v, p).size() != n)
                throw ValidationError(p, "expected " + std::to_string(n) + " entries");
            for (std::size_t i = 0; i < n; ++i)
                s.generators[i] = generator(v[i], child(p, i));
        });
        optional(doc, "initial_svc_active", root,
                 [&](const json& v, const std::string& p) { s.initial_svc_active = booleans(v, p); });
        optional(doc, "plant", root, [&](const json& v, const std::string& p) {
            object(v, p, {"dt", "t_power", "t_control"});
            optional(v, "dt", p, [&](const json& x, const std::string& q) { s.plant.dt = number(x, q); });
            optional(v, "t_power", p, [&](const json& x, const std::string& q) { s.plant.t_power = number(x, q); });
            optional(v, "t_control", p,
                     [&](const json& x, const std::string& q) { s.plant.t_control = number(x, q); });
        });

        s.inner.gains.clear();
        for (std::size_t i = 0; i < n; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            s.inner.gains.push_back({s.model.c_q()(ii, ii) / s.generators[i].tau_avr, 2.0, 1});
        }
        optional(doc, "inner", root, [&](const json& v, const std::string& p) {
            object(v, p, {"period", "gains", "differentiator"});
            optional(v, "period", p, [&](const json& x, const std::string& q) { s.inner.period = number(x, q); });
            optional(v, "gains", p, [&](const json& x, const std::string& q) {
                if (array(x, q).size() != n)
                    throw ValidationError(q, "expected " + std::to_string(n) + " entries");
                for (std::size_t i = 0; i < n; ++i)
                    s.inner.gains[i] = gains(x[i], child(q, i));
            });
            optional(v, "differentiator", p, [&](const json& x, const std::string& q) {
                s.inner.differentiator = differentiator(x, q, s.inner.differentiator);
            });
        });
        optional(doc, "outer", root, [&](const json& v, const std::string& p) {
            object(v, p, {"period", "gains", "differentiator"});
            optional(v, "period", p, [&](const json& x, const std::string& q) { s.outer.period = number(x, q); });
            optional(v, "gains", p, [&](const json& x, const std::string& q) { s.outer.gains = gains(x, q); });
            optional(v, "differentiator", p, [&](const json& x, const std::string& q) {
                s.outer.differentiator = differentiator(x, q, s.outer.differentiator);
            });
        });
        optional(doc, "reference_derivative", root, [&](const json& v, const std::string& p) {
            const std::string mode = string(v, p);
            if (mode == "zero")
                s.reference_derivative = ReferenceDerivative::Zero;
            else if (mode == "differentiate")
                s.reference_derivative = ReferenceDerivative::Differentiate;
            else
                throw ValidationError(p, "expected \"zero\" or \"differentiate\"");
        });
        optional(doc, "u2_distribution", root, [&](const json& v, const std::string& p) {
            const std::string mode = string(v, p);
            if (mode == "uniform")
                s.u2_distribution = U2Distribution::Uniform;
            else if (mode == "participation")
                s.u2_distribution = U2Distribution::Participation;
            else
                throw ValidationError(p, "expected \"uniform\" or \"participation\"");
        });
        optional(doc, "log_interval", root,
                 [&](const json& v, const std::string& p) { s.log_interval = number(v, p); });
        optional(doc, "tolerances", root, [&](const json& v, const std::string& p) {
            object(v, p, {"solve_residual", "degeneracy"});
            optional(v, "solve_residual", p,
                     [&](const json& x, const std::string& q) { s.tolerances.solve_residual = number(x, q); });
            optional(v, "degeneracy", p,
                     [&](const json& x, const std::string& q) { s.tolerances.degeneracy = number(x, q); });
        });
        optional(doc, "events", root, [&](const json& v, const std::string& p) {
            for (std::size_t i = 0; i < array(v, p).size(); ++i)
                s.events.push_back(event(v[i], child(p, i)));
        });

        validate(s);
        return s;
    }
};

json model_to_json(const SensitivityModel& m) {
    json c_v = json::array();
    json c_q = json::array();
    for (Eigen::Index i = 0; i < m.c_v().size(); ++i) {
        c_v.push_back(m.c_v()[i]);
        json row = json::array();
        for (Eigen::Index k = 0; k < m.c_q().cols(); ++k)
            row.push_back(m.c_q()(i, k));
        c_q.push_back(std::move(row));
    }
    return {{"c_v", std::move(c_v)}, {"c_q", std::move(c_q)}};
}

json gains_to_json(const DtipGains& g) { return {{"alpha", g.alpha}, {"k_p", g.k_p}, {"h_d", g.h_d}}; }

json diff_to_json(const DifferentiatorConfig& d) { return {{"t_ndf", d.t_ndf}, {"n_ndf", d.n_ndf}}; }

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

json event_to_json(const Event& ev) {
    json j{{"at", ev.at}, {"kind", event_tag(ev.kind)}};
    std::visit(overloaded{[&](const SetpointStep& e) { j["v_pp_ref"] = e.v_pp_ref; },
                          [&](const SetDelay& e) { j["delay"] = e.delay; },
                          [&](const LoadDisturbance& e) {
                              j["d_v"] = e.d_v;
                              j["d_q"] = e.d_q;
                          },
                          [&](const LinePerturb& e) {
                              j["gen"] = e.gen;
                              j["factor"] = e.factor;
                              if (e.model)
                                  j["model"] = model_to_json(*e.model);
                          },
                          [&](const Disconnect& e) { j["gen"] = e.gen; },
                          [&](const JoinSvc& e) { j["gen"] = e.gen; },
                          [&](const LeaveSvc& e) { j["gen"] = e.gen; }},
               ev.kind);
    return j;
}

std::string with_line(const std::string& text, const ValidationError& e) {
    const auto [line, col] = locate(text, e.field());
    return "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.reason();
}

} // namespace

Scenario scenario_from_json(const json& doc) { return Reader{}.scenario(doc); }

json scenario_to_json(const Scenario& s) {
    json gens = json::array();
    for (const auto& g : s.generators) {
        gens.push_back({{"tau_avr", g.tau_avr},
                        {"v_base", g.v_base ? json(*g.v_base) : json("auto")},
                        {"v_min", g.v_min},
                        {"v_max", g.v_max}});
    }
    json inner_gains = json::array();
    for (const auto& g : s.inner.gains)
        inner_gains.push_back(gains_to_json(g));
    json events = json::array();
    for (const auto& ev : s.events)
        events.push_back(event_to_json(ev));

    json doc;
    doc["name"] = s.name;
    doc["duration"] = s.duration;
    doc["v_pp_ref"] = s.v_pp_ref;
    doc["model"] = model_to_json(s.model);
    doc["participation"] = s.pf.values();
    doc["generators"] = std::move(gens);
    if (!s.initial_svc_active.empty())
        doc["initial_svc_active"] = s.initial_svc_active;
    doc["plant"] = {{"dt", s.plant.dt}, {"t_power", s.plant.t_power}, {"t_control", s.plant.t_control}};
    doc["inner"] = {{"period", s.inner.period},
                    {"gains", std::move(inner_gains)},
                    {"differentiator", diff_to_json(s.inner.differentiator)}};
    doc["outer"] = {{"period", s.outer.period},
                    {"gains", gains_to_json(s.outer.gains)},
                    {"differentiator", diff_to_json(s.outer.differentiator)}};
    doc["reference_derivative"] =
        s.reference_derivative == ReferenceDerivative::Zero ? "zero" : "differentiate";
    doc["u2_distribution"] = s.u2_distribution == U2Distribution::Uniform ? "uniform" : "participation";
    doc["log_interval"] = s.log_interval;
    doc["tolerances"] = {{"solve_residual", s.tolerances.solve_residual},
                         {"degeneracy", s.tolerances.degeneracy}};
    doc["events"] = std::move(events);
    return doc;
}

std::string serialize_scenario(const Scenario& s) { return scenario_to_json(s).dump(2) + "\n"; }

Scenario parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto byte = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        std::size_t line = 1;
        std::size_t col = 1;
        for (std::size_t i = 0; i < byte; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string what = e.what();
        if (const auto p = what.rfind(": "); p != std::string::npos)
            what = what.substr(p + 2);
        throw ParseError(line, col, what);
    }
    try {
        return scenario_from_json(doc);
    } catch (const ValidationError& e) {
        throw ValidationError(e.field(), with_line(text, e));
    }
}

Scenario parse_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

Override parse_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw InvalidArgument("override \"" + assignment + "\" is not key=value");
    return {assignment.substr(0, eq), assignment.substr(eq + 1)};
}

void apply_overrides(json& doc, const std::vector<Override>& overrides) {
    for (const auto& [key, raw] : overrides) {
        std::string pointer;
        std::size_t start = 0;
        while (start <= key.size()) {
            const auto dot = key.find('.', start);
            const auto seg = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
            if (seg.empty())
                throw InvalidArgument("override key \"" + key + "\" has an empty segment");
            pointer += "/" + seg;
            if (dot == std::string::npos)
                break;
            start = dot + 1;
        }
        json value = json::parse(raw, nullptr, false);
        if (value.is_discarded())
            value = raw;
        try {
            doc[json::json_pointer(pointer)] = std::move(value);
        } catch (const json::exception& e) {
            throw ValidationError(pointer, std::string("cannot apply override: ") + e.what());
        }
    }
}

std::pair<std::size_t, std::size_t> locate(const std::string& text, const std::string& pointer) {
    struct Frame {
        bool object;
        std::size_t index;
        std::string key;
        bool expect_key;
    };
    std::vector<Frame> stack;
    std::size_t line = 1;
    std::size_t col = 1;
    std::size_t best_len = 0;
    std::pair<std::size_t, std::size_t> best{1, 1};

    auto path = [&] {
        std::string p;
        for (const auto& f : stack)
            p += "/" + (f.object ? f.key : std::to_string(f.index));
        return p;
    };
    // Called where a value starts.
    auto value_at = [&] {
        const std::string p = path();
        const bool prefix = pointer.compare(0, p.size(), p) == 0 &&
                            (p.size() == pointer.size() || pointer[p.size()] == '/');
        if (prefix && (p.size() > best_len || best_len == 0)) {
            best_len = p.size();
            best = {line, col};
        }
    };
    auto advance = [&](char c) {
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        const bool in_key = !stack.empty() && stack.back().object && stack.back().expect_key;
        if (c == '"') {
            std::string s;
            if (!in_key)
                value_at();
            advance(c);
            for (++i; i < text.size() && text[i] != '"'; ++i) {
                if (text[i] == '\\' && i + 1 < text.size()) {
                    advance(text[i]);
                    ++i;
                }
                s += text[i];
                advance(text[i]);
            }
            if (i < text.size())
                advance(text[i]);
            if (in_key) {
                stack.back().key = s;
                stack.back().expect_key = false;
            }
            continue;
        }
        if (c == '{' || c == '[') {
            value_at();
            stack.push_back({c == '{', 0, {}, c == '{'});
        } else if (c == '}' || c == ']') {
            if (!stack.empty())
                stack.pop_back();
        } else if (c == ',') {
            if (!stack.empty()) {
                if (stack.back().object)
                    stack.back().expect_key = true;
                else
                    ++stack.back().index;
            }
        } else if (c != ':' && !std::isspace(static_cast<unsigned char>(c))) {
            value_at();
            while (i + 1 < text.size() && std::string_view(",]}: \t\r\n").find(text[i + 1]) == std::string_view::npos) {
                advance(text[i]);
                ++i;
            }
        }
        advance(text[i]);
    }
    return best;
}

} // namespace svc
