#include "rlocus/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "rlocus/error.hpp"

namespace rlocus {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

double number_field(const json& doc, const char* key) {
    if (!doc.contains(key)) fail(std::string("missing field \"") + key + "\"");
    const json& v = doc.at(key);
    if (!v.is_number()) fail(std::string("field \"") + key + "\" must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(std::string("field \"") + key + "\" must be finite");
    return x;
}

std::vector<Complex> complex_list(const json& doc, const char* key) {
    if (!doc.contains(key)) fail(std::string("missing field \"") + key + "\"");
    const json& v = doc.at(key);
    if (!v.is_array()) fail(std::string("field \"") + key + "\" must be an array of [re, im] pairs");
    std::vector<Complex> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const json& e = v[i];
        const std::string where = std::string(key) + "[" + std::to_string(i) + "]";
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            fail(where + " must be a [re, im] pair of numbers");
        const Complex c(e[0].get<double>(), e[1].get<double>());
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) fail(where + " must be finite");
        out.push_back(c);
    }
    return out;
}

RealPolynomial coefficient_list(const json& doc, const char* key) {
    if (!doc.contains(key)) fail(std::string("missing field \"") + key + "\"");
    const json& v = doc.at(key);
    if (!v.is_array() || v.empty()) fail(std::string("field \"") + key + "\" must be a nonempty array of numbers");
    std::vector<double> c;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number() || !std::isfinite(v[i].get<double>()))
            fail(std::string(key) + "[" + std::to_string(i) + "] must be a finite number");
        c.push_back(v[i].get<double>());
    }
    return RealPolynomial(std::move(c));
}

// Rethrows plant invariant failures with the field that caused them.
template <class F>
Plant with_field(const char* field, F&& make) {
    try {
        return make();
    } catch (const Error& e) {
        if (e.code() != ErrorCode::InvalidPlant) throw;
        throw Error(ErrorCode::InvalidPlant, std::string(field) + ": " + e.what());
    }
}

double signed_gain(double k, GainSign sign) { return sign == GainSign::Negative ? -k : k; }

json pair(Complex c) { return json::array({c.real(), c.imag()}); }

json crossing_json(const BoundaryCrossing& c) {
    return json{{"omega", c.omega}, {"k", signed_gain(c.k, c.sign)}};
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

}  // namespace

Plant parse_input(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const std::size_t pos = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n');
        fail("line " + std::to_string(line) + ": malformed JSON (" + e.what() + ")");
    }
    if (!doc.is_object()) fail("top level must be an object");

    const double delay = number_field(doc, "delay");
    if (!(delay > 0.0)) throw Error(ErrorCode::InvalidPlant, "delay: delay must be positive");

    const bool zpk = doc.contains("poles") || doc.contains("zeros") || doc.contains("alpha");
    const bool tf = doc.contains("num") || doc.contains("den");
    if (zpk && tf) fail("give either alpha/zeros/poles or num/den, not both");
    if (tf) {
        const RealPolynomial num = coefficient_list(doc, "num");
        const RealPolynomial den = coefficient_list(doc, "den");
        if (num.is_zero()) throw Error(ErrorCode::InvalidPlant, "num: numerator must be nonzero");
        if (den.is_zero()) throw Error(ErrorCode::InvalidPlant, "den: denominator must be nonzero");
        return with_field("num/den", [&] { return plant_from_coefficients(num, den, delay); });
    }
    if (!zpk) fail("expected alpha/zeros/poles or num/den");
    const double alpha = number_field(doc, "alpha");
    auto zeros = complex_list(doc, "zeros");
    auto poles = complex_list(doc, "poles");
    if (alpha == 0.0) throw Error(ErrorCode::InvalidPlant, "alpha: alpha must be nonzero");
    if (zeros.size() > poles.size()) throw Error(ErrorCode::InvalidPlant, "zeros: improper system, more zeros than poles");
    return with_field("zeros/poles", [&] { return Plant(alpha, delay, std::move(zeros), std::move(poles)); });
}

namespace {

json plant_doc(const Plant& plant) {
    json zeros = json::array();
    json poles = json::array();
    for (const Complex z : plant.zeros()) zeros.push_back(pair(z));
    for (const Complex p : plant.poles()) poles.push_back(pair(p));
    return json{{"alpha", plant.alpha()}, {"delay", plant.delay()}, {"zeros", zeros}, {"poles", poles}};
}

}  // namespace

std::string plant_json(const Plant& plant) { return plant_doc(plant).dump(); }

std::string emit_json(const RootLocusResult& result) {
    json doc;
    doc["plant"] = plant_doc(result.plant);
    doc["region"] = {{"sigma0", result.region.sigma0}, {"kmax", result.region.kmax}};

    json inward = json::array();
    json outward = json::array();
    for (const auto* set : {&result.crossings, result.negative_crossings ? &*result.negative_crossings : nullptr}) {
        if (!set) continue;
        for (const auto& c : set->inward) inward.push_back(crossing_json(c));
        for (const auto& c : set->outward) outward.push_back(crossing_json(c));
    }
    doc["crossings"] = {{"inward", inward}, {"outward", outward}};

    json branches = json::array();
    for (const auto& b : result.branch_points)
        branches.push_back({{"re", b.s.real()},
                            {"im", b.s.imag()},
                            {"k", signed_gain(b.k, b.sign)},
                            {"multiplicity", b.multiplicity}});
    doc["branch_points"] = branches;

    json trajs = json::array();
    for (std::size_t i = 0; i < result.trajectories.size(); ++i) {
        const Trajectory& t = result.trajectories[i];
        json origin = {{"kind", to_string(t.origin.kind)}, {"index", t.origin.index}, {"angle", t.origin.angle}};
        if (t.origin.conjugate) origin["conjugate"] = true;
        json term = {{"kind", to_string(t.termination.kind)}};
        if (t.termination.branch) {
            term["branch"] = *t.termination.branch;
            term["arrival_angle"] = t.termination.arrival_angle;
        }
        if (t.termination.exit_match) {
            term["exit_match"] = *t.termination.exit_match;
            if (t.termination.exit_conjugate) term["exit_conjugate"] = true;
        }
        if (!t.termination.diagnostic.empty()) term["diagnostic"] = t.termination.diagnostic;

        json points = json::array();
        if (t.start_pole) points.push_back(json::array({t.start_pole->real(), t.start_pole->imag(), 0.0}));
        for (const auto& p : t.points)
            points.push_back(json::array({p.sigma, p.omega, signed_gain(std::exp(p.Kval), t.sign)}));
        trajs.push_back({{"id", i},
                         {"sign", to_string(t.sign)},
                         {"mirrored", t.mirrored},
                         {"origin", origin},
                         {"termination", term},
                         {"points", points}});
    }
    doc["trajectories"] = trajs;
    doc["diagnostics"] = result.diagnostics;
    return doc.dump(2) + "\n";
}

std::string emit_csv(const RootLocusResult& result) {
    std::string out = "traj_id,sigma,omega,k\n";
    char buf[128];
    auto row = [&](std::size_t id, double s, double w, double k) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", id, s, w, k);
        out += buf;
    };
    for (std::size_t i = 0; i < result.trajectories.size(); ++i) {
        const Trajectory& t = result.trajectories[i];
        if (t.start_pole) row(i, t.start_pole->real(), t.start_pole->imag(), 0.0);
        for (const auto& p : t.points) row(i, p.sigma, p.omega, signed_gain(std::exp(p.Kval), t.sign));
    }
    return out;
}

namespace {

struct Box {
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    void add(double x, double y) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    }
    bool empty() const { return !(x0 <= x1); }
};

// 1, 2 or 5 times a power of ten, close to span / 8.
double tick_step(double span) {
    const double raw = span / 8.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    return (r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0) * mag;
}

void widen(double& lo, double& hi) {
    double span = hi - lo;
    if (!(span > 0.0)) span = std::max(1.0, std::abs(lo));
    const double mid = 0.5 * (lo + hi);
    lo = std::min(lo, mid - 0.5 * span) - 0.1 * span;
    hi = std::max(hi, mid + 0.5 * span) + 0.1 * span;
}

}  // namespace

std::string emit_svg(const RootLocusResult& result) {
    constexpr double W = 800, H = 600, L = 70, R = 20, T = 20, B = 50;
    const double sigma0 = result.region.sigma0;

    Box box;
    for (const auto& t : result.trajectories) {
        if (t.start_pole) box.add(t.start_pole->real(), t.start_pole->imag());
        for (const auto& p : t.points) box.add(p.sigma, p.omega);
    }
    if (box.empty())
        for (const Complex p : result.plant.poles()) box.add(p.real(), p.imag());
    if (box.empty()) box.add(sigma0, 0.0);
    box.add(sigma0, box.y0);
    widen(box.x0, box.x1);
    widen(box.y0, box.y1);

    const auto px = [&](double x) { return L + (x - box.x0) / (box.x1 - box.x0) * (W - L - R); };
    const auto py = [&](double y) { return T + (box.y1 - y) / (box.y1 - box.y0) * (H - T - B); };

    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
      << "<style>\n"
      << ".trajectory{fill:none;stroke-width:1.2}\n"
      << ".positive{stroke:#1f5fa8}\n.negative{stroke:#b8461b}\n"
      << ".grid{stroke:#e4e4e4;stroke-width:0.6}\n.axis{stroke:#999;stroke-width:0.8}\n"
      << ".frame{fill:none;stroke:#333}\n.boundary{stroke:#2a8a2a;stroke-width:1.2;stroke-dasharray:6 4}\n"
      << "text{font-family:sans-serif;font-size:11px}\n"
      << ".pole-marker,.zero-marker,.branch-marker{font-size:15px;text-anchor:middle;dominant-baseline:central}\n"
      << ".branch-marker{fill:#a01a7d}\n"
      << "</style>\n"
      << "<defs><clipPath id=\"plot\"><rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R
      << "\" height=\"" << H - T - B << "\"/></clipPath></defs>\n";

    // grid and tick labels
    const double xs = tick_step(box.x1 - box.x0);
    const double ys = tick_step(box.y1 - box.y0);
    o << "<g class=\"ticks\">\n";
    for (double i = std::ceil(box.x0 / xs); i * xs <= box.x1; i += 1.0) {
        const double x = i * xs;
        const std::string X = fmt("%.2f", px(x));
        o << "<line class=\"grid\" x1=\"" << X << "\" y1=\"" << T << "\" x2=\"" << X << "\" y2=\"" << H - B << "\"/>"
          << "<text x=\"" << X << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << fmt("%g", i == 0 ? 0.0 : x)
          << "</text>\n";
    }
    for (double i = std::ceil(box.y0 / ys); i * ys <= box.y1; i += 1.0) {
        const double y = i * ys;
        const std::string Y = fmt("%.2f", py(y));
        o << "<line class=\"grid\" x1=\"" << L << "\" y1=\"" << Y << "\" x2=\"" << W - R << "\" y2=\"" << Y << "\"/>"
          << "<text x=\"" << L - 6 << "\" y=\"" << Y << "\" text-anchor=\"end\" dominant-baseline=\"central\">"
          << fmt("%g", i == 0 ? 0.0 : y) << "</text>\n";
    }
    o << "</g>\n";
    o << "<g clip-path=\"url(#plot)\">\n";
    if (box.y0 < 0 && box.y1 > 0)
        o << "<line class=\"axis\" x1=\"" << L << "\" y1=\"" << fmt("%.2f", py(0)) << "\" x2=\"" << W - R << "\" y2=\""
          << fmt("%.2f", py(0)) << "\"/>\n";
    if (box.x0 < 0 && box.x1 > 0)
        o << "<line class=\"axis\" x1=\"" << fmt("%.2f", px(0)) << "\" y1=\"" << T << "\" x2=\"" << fmt("%.2f", px(0))
          << "\" y2=\"" << H - B << "\"/>\n";

    o << "<line class=\"boundary\" x1=\"" << fmt("%.2f", px(sigma0)) << "\" y1=\"" << T << "\" x2=\""
      << fmt("%.2f", px(sigma0)) << "\" y2=\"" << H - B << "\"><title>Re(s) = " << fmt("%g", sigma0)
      << "</title></line>\n";

    for (std::size_t i = 0; i < result.trajectories.size(); ++i) {
        const Trajectory& t = result.trajectories[i];
        o << "<polyline class=\"trajectory " << (t.sign == GainSign::Positive ? "positive" : "negative")
          << "\" id=\"t" << i << "\" points=\"";
        bool first = true;
        auto vertex = [&](double x, double y) {
            if (!first) o << ' ';
            first = false;
            o << fmt("%.2f", px(x)) << ',' << fmt("%.2f", py(y));
        };
        if (t.start_pole) vertex(t.start_pole->real(), t.start_pole->imag());
        for (const auto& p : t.points) vertex(p.sigma, p.omega);
        o << "\"/>\n";
    }
    o << "</g>\n";

    auto marker = [&](const char* cls, const char* glyph, Complex c) {
        o << "<text class=\"" << cls << "\" x=\"" << fmt("%.2f", px(c.real())) << "\" y=\"" << fmt("%.2f", py(c.imag()))
          << "\">" << glyph << "</text>\n";
    };
    for (const Complex p : result.plant.poles()) marker("pole-marker", "×", p);
    for (const Complex z : result.plant.zeros()) marker("zero-marker", "○", z);
    for (const auto& b : result.branch_points) marker("branch-marker", "◆", b.s);

    o << "<rect class=\"frame\" x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
      << H - T - B << "\"/>\n"
      << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">Re(s)</text>\n"
      << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << (T + H - B) / 2 << ")\">Im(s)</text>\n"
      << "</svg>\n";
    return o.str();
}

std::string read_text(const std::string& path) {
    if (path == "-") return std::string(std::istreambuf_iterator<char>(std::cin), {});
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    out << text;
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "write failed: " + path);
}

}  // namespace rlocus
