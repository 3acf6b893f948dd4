#include "xva/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>

#include "xva/analytic.hpp"

namespace xva::cli {

namespace {

struct Entry {
    std::string value;
    int line = 0;
    mutable bool used = false;
};

using Section = std::map<std::string, Entry>;
using Document = std::map<std::string, Section>;

const char* const kKnownSections[] = {"model", "claim", "parties", "grid",
                                      "solver", "output", "sweep"};

bool known_section(const std::string& name) {
    for (const char* s : kKnownSections) {
        if (name == s) {
            return true;
        }
    }
    return false;
}

std::string trim(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return {};
    }
    const auto end = text.find_last_not_of(" \t\r");
    return text.substr(begin, end - begin + 1);
}

Document tokenize(const std::string& text) {
    Document doc;
    std::istringstream stream(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(stream, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) {
            raw.erase(hash);
        }
        const std::string line = trim(raw);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw ParseError(line_no, "malformed section header '" + line + "'");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (!known_section(section)) {
                throw ParseError(line_no, "unknown section [" + section + "]");
            }
            doc[section];  // a section may legitimately be empty
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError(line_no, "expected 'key = value', got '" + line + "'");
        }
        if (section.empty()) {
            throw ParseError(line_no, "key outside of any section");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ParseError(line_no, "empty key");
        }
        if (value.empty()) {
            throw ParseError(line_no, "empty value for key '" + key + "'");
        }
        auto [it, inserted] = doc[section].emplace(key, Entry{value, line_no});
        if (!inserted) {
            throw ParseError(line_no, "duplicate key '" + key + "' in section [" + section + "]");
        }
    }
    return doc;
}

double parse_number(const std::string& text, int line) {
    std::string body = text;
    double scale = 1.0;
    if (!body.empty() && body.back() == '%') {
        body.pop_back();
        body = trim(body);
        scale = 0.01;
    }
    char* end = nullptr;
    const double value = std::strtod(body.c_str(), &end);
    if (end == body.c_str() || *end != '\0') {
        throw ParseError(line, "not a number: '" + text + "'");
    }
    return value * scale;
}

std::vector<double> parse_number_list(const std::string& text, int line) {
    std::vector<double> values;
    std::string item;
    std::istringstream stream(text);
    while (std::getline(stream, item, ',')) {
        item = trim(item);
        if (item.empty()) {
            throw ParseError(line, "empty element in list '" + text + "'");
        }
        values.push_back(parse_number(item, line));
    }
    if (values.empty()) {
        throw ParseError(line, "empty list");
    }
    return values;
}

/// Typed access to one section with required/optional key helpers.
class Reader {
public:
    Reader(const Document& doc, std::string name) : name_(std::move(name)) {
        const auto it = doc.find(name_);
        section_ = it == doc.end() ? nullptr : &it->second;
    }

    bool present() const { return section_ != nullptr; }
    bool has(const std::string& key) const {
        return section_ != nullptr && section_->count(key) > 0;
    }

    const Entry& require(const std::string& key) const {
        if (!has(key)) {
            throw ValidationError("[" + name_ + "] is missing required key '" + key + "'");
        }
        const Entry& entry = section_->at(key);
        entry.used = true;
        return entry;
    }

    double number(const std::string& key) const {
        const Entry& entry = require(key);
        return parse_number(entry.value, entry.line);
    }

    double number_or(const std::string& key, double fallback) const {
        return has(key) ? number(key) : fallback;
    }

    std::vector<double> number_list(const std::string& key) const {
        const Entry& entry = require(key);
        return parse_number_list(entry.value, entry.line);
    }

    std::string word(const std::string& key) const {
        const Entry& entry = require(key);
        return entry.value;
    }

    std::string word_or(const std::string& key, const std::string& fallback) const {
        return has(key) ? word(key) : fallback;
    }

    int line_of(const std::string& key) const { return section_->at(key).line; }

private:
    std::string name_;
    const Section* section_ = nullptr;
};

void reject_unused(const Document& doc) {
    for (const auto& [section, entries] : doc) {
        for (const auto& [key, entry] : entries) {
            if (!entry.used) {
                throw ParseError(entry.line,
                                 "unknown key '" + key + "' in section [" + section + "]");
            }
        }
    }
}

ModelSection parse_model(const Reader& reader) {
    ModelSection model;
    const std::string type = reader.word("type");
    if (type == "equity") {
        model.kind = ModelKind::Equity;
    } else if (type == "ou") {
        model.kind = ModelKind::OU;
    } else if (type == "cir") {
        model.kind = ModelKind::CIR;
    } else {
        throw ParseError(reader.line_of("type"),
                         "model type must be equity, ou, or cir; got '" + type + "'");
    }
    model.r = reader.number("r");
    if (model.kind == ModelKind::Equity) {
        model.sigma = reader.number("sigma");
        model.local_intensity = reader.has("intensity_scale");
        if (model.local_intensity) {
            model.intensity_scale = reader.number("intensity_scale");
            model.intensity_power = reader.number("intensity_power");
            model.intensity_cap = reader.number("intensity_cap");
        } else {
            model.lambda0 = reader.number("lambda0");
        }
        const std::string conv = reader.word_or("convention", "compensated");
        if (conv == "compensated") {
            model.convention = JumpConvention::Compensated;
        } else if (conv == "uncompensated") {
            model.convention = JumpConvention::Uncompensated;
        } else {
            throw ParseError(reader.line_of("convention"),
                             "convention must be compensated or uncompensated");
        }
    } else {
        model.kappa = reader.number("kappa");
        model.theta = reader.number("theta");
        model.sigma = reader.number("sigma");
        model.psi0 = reader.number_or("psi0", 0.0);
        model.w0 = reader.number_or("w0", 1.0);
        model.x_cap = reader.number("x_cap");
    }
    return model;
}

ClaimSection parse_claim(const Reader& reader) {
    ClaimSection claim;
    const std::string type = reader.word("type");
    claim.maturity = reader.number("maturity");
    if (type == "call_spread") {
        claim.kind = ClaimKind::CallSpread;
        claim.spread.strike = reader.number("strike");
        claim.spread.eps_lo = reader.number("eps_lo");
        claim.spread.eps_hi = reader.number("eps_hi");
        claim.spread.m_lo = reader.number("m_lo");
        claim.spread.m_hi = reader.number("m_hi");
    } else if (type == "forward") {
        claim.kind = ClaimKind::Forward;
        claim.f0 = reader.number("f0");
    } else if (type == "equity_trs") {
        claim.kind = ClaimKind::EquityTrs;
        claim.s0 = reader.number("s0");
        claim.premium = reader.number("premium");
    } else if (type == "cds") {
        claim.kind = ClaimKind::Cds;
        claim.premium = reader.number("premium");
    } else if (type == "bond_trs") {
        claim.kind = ClaimKind::BondTrs;
        claim.premium = reader.number("premium");
        claim.bond_maturity = reader.number("bond_maturity");
        claim.x0 = reader.number_or("x0", 0.0);
        if (reader.has("strike")) {
            claim.strike = reader.number("strike");
        }
    } else {
        throw ParseError(reader.line_of("type"), "unknown claim type '" + type + "'");
    }
    return claim;
}

void parse_parties(const Reader& reader, PartyParams& p1, PartyParams& p2) {
    p1.intensity = reader.number("lambda1");
    p2.intensity = reader.number("lambda2");
    p1.loss_rate = reader.number("loss_rate1");
    p2.loss_rate = reader.number("loss_rate2");
    p1.collateral_ratio = reader.number_or("delta1", 0.0);
    p2.collateral_ratio = reader.number_or("delta2", 0.0);
    p1.collateral_rate = reader.number_or("c1", 0.0);
    p2.collateral_rate = reader.number_or("c2", 0.0);
}

SolverSection parse_solver(const Reader& reader) {
    SolverSection solver;
    if (!reader.present()) {
        return solver;
    }
    solver.tolerance = reader.number_or("tolerance", solver.tolerance);
    solver.max_iter = static_cast<int>(reader.number_or("max_iter", solver.max_iter));
    const std::string scheme = reader.word_or("scheme", "implicit_linear");
    if (scheme == "implicit_linear") {
        solver.scheme = IterationScheme::ImplicitLinear;
    } else if (scheme == "explicit_source") {
        solver.scheme = IterationScheme::ExplicitSource;
    } else {
        throw ParseError(reader.line_of("scheme"),
                         "scheme must be implicit_linear or explicit_source");
    }
    if (reader.has("error_slice_time")) {
        solver.error_slice_time = reader.number("error_slice_time");
    }
    const std::string sides = reader.word_or("sides", "both");
    if (sides == "buyer") {
        solver.sides = SideRequest::Buyer;
    } else if (sides == "seller") {
        solver.sides = SideRequest::Seller;
    } else if (sides == "both") {
        solver.sides = SideRequest::Both;
    } else {
        throw ParseError(reader.line_of("sides"), "sides must be buyer, seller, or both");
    }
    return solver;
}

std::string format_number(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

}  // namespace

RunSpec parse_config(const std::string& text) {
    const Document doc = tokenize(text);

    RunSpec spec;
    spec.model = parse_model(Reader(doc, "model"));
    spec.claim = parse_claim(Reader(doc, "claim"));
    parse_parties(Reader(doc, "parties"), spec.party1, spec.party2);

    const Reader grid(doc, "grid");
    spec.grid.x_min = grid.number_or("x_min", 0.0);
    spec.grid.x_max = grid.number("x_max");
    spec.grid.dx = grid.number("dx");
    spec.grid.t_max = grid.number_or("t_max", spec.claim.maturity);
    spec.grid.dt = grid.number("dt");

    spec.solver = parse_solver(Reader(doc, "solver"));

    const Reader output(doc, "output");
    if (output.present()) {
        spec.output.probe_t = output.number_or("probe_t", 0.0);
        if (output.has("probes")) {
            spec.output.probes = output.number_list("probes");
        }
    }

    const Reader sweep(doc, "sweep");
    if (sweep.present()) {
        SweepSection section;
        section.parameter = sweep.word("parameter");
        section.values = sweep.number_list("values");
        spec.sweep = std::move(section);
    }

    reject_unused(doc);
    spec.validate();
    return spec;
}

EquityModel RunSpec::equity_model() const {
    if (model.kind != ModelKind::Equity) {
        throw ValidationError("config does not describe an equity model");
    }
    const IntensitySpec intensity =
        model.local_intensity
            ? IntensitySpec::local_power(model.intensity_scale, model.intensity_power,
                                         model.intensity_cap)
            : IntensitySpec::constant(model.lambda0);
    return {.r = model.r, .sigma = model.sigma, .ref_intensity = intensity};
}

FactorModel RunSpec::factor_model() const {
    if (model.kind == ModelKind::Equity) {
        throw ValidationError("config does not describe a factor model");
    }
    return {.kind = model.kind == ModelKind::OU ? FactorKind::OU : FactorKind::CIR,
            .kappa = model.kappa,
            .theta = model.theta,
            .sigma = model.sigma,
            .psi0 = model.psi0,
            .w0 = model.w0,
            .x_cap = model.x_cap};
}

ClaimTriplet RunSpec::build_claim() const {
    switch (claim.kind) {
        case ClaimKind::CallSpread:
            return call_spread(claim.spread, model.r, claim.maturity);
        case ClaimKind::Forward:
            return equity_forward(claim.f0, model.r, claim.maturity);
        case ClaimKind::EquityTrs:
            return equity_trs(claim.s0, claim.premium, model.r, claim.maturity);
        case ClaimKind::Cds:
            return cds(claim.premium, claim.maturity);
        case ClaimKind::BondTrs: {
            const FactorModel factor = factor_model();
            auto pricer = [factor, r = model.r](double t, double x, double T) {
                return analytic::bond_price(factor, t, x, T, r);
            };
            const double strike =
                claim.strike ? *claim.strike
                             : analytic::bond_price(factor, 0.0, claim.x0, claim.bond_maturity,
                                                    model.r);
            return bond_trs(claim.maturity, claim.bond_maturity, claim.premium, strike, model.r,
                            pricer);
        }
    }
    throw ValidationError("unreachable claim kind");
}

void RunSpec::validate() const {
    const bool equity_claim = claim.kind == ClaimKind::CallSpread ||
                              claim.kind == ClaimKind::Forward ||
                              claim.kind == ClaimKind::EquityTrs;
    if (equity_claim != (model.kind == ModelKind::Equity)) {
        throw ValidationError("claim type does not match the model type");
    }
    if (model.kind == ModelKind::Equity) {
        equity_model().validate();
    } else {
        factor_model().validate();
    }
    party1.validate();
    party2.validate();
    grid.validate();
    if (std::abs(grid.t_max - claim.maturity) > 1e-9 * std::max(1.0, claim.maturity)) {
        throw ValidationError("grid t_max must equal the claim maturity");
    }
    if (!(solver.tolerance > 0.0)) {
        throw ValidationError("solver tolerance must be positive");
    }
    if (solver.max_iter < 1) {
        throw ValidationError("solver max_iter must be at least 1");
    }
    if (sweep) {
        static const char* const kParams[] = {"lambda1", "lambda2", "delta1",
                                              "delta2", "c1", "c2"};
        bool ok = false;
        for (const char* p : kParams) {
            ok = ok || sweep->parameter == p;
        }
        if (!ok) {
            throw ValidationError("unknown sweep parameter '" + sweep->parameter + "'");
        }
    }
    build_claim();  // exercises claim-level validation (slope, strikes, ...)
}

std::string serialize(const RunSpec& spec) {
    std::ostringstream out;
    auto emit = [&out](const std::string& key, double value) {
        out << key << " = " << format_number(value) << "\n";
    };

    out << "[model]\n";
    switch (spec.model.kind) {
        case ModelKind::Equity:
            out << "type = equity\n";
            break;
        case ModelKind::OU:
            out << "type = ou\n";
            break;
        case ModelKind::CIR:
            out << "type = cir\n";
            break;
    }
    emit("r", spec.model.r);
    if (spec.model.kind == ModelKind::Equity) {
        emit("sigma", spec.model.sigma);
        if (spec.model.local_intensity) {
            emit("intensity_scale", spec.model.intensity_scale);
            emit("intensity_power", spec.model.intensity_power);
            emit("intensity_cap", spec.model.intensity_cap);
        } else {
            emit("lambda0", spec.model.lambda0);
        }
        out << "convention = "
            << (spec.model.convention == JumpConvention::Compensated ? "compensated"
                                                                     : "uncompensated")
            << "\n";
    } else {
        emit("kappa", spec.model.kappa);
        emit("theta", spec.model.theta);
        emit("sigma", spec.model.sigma);
        emit("psi0", spec.model.psi0);
        emit("w0", spec.model.w0);
        emit("x_cap", spec.model.x_cap);
    }

    out << "\n[claim]\n";
    switch (spec.claim.kind) {
        case ClaimKind::CallSpread:
            out << "type = call_spread\n";
            break;
        case ClaimKind::Forward:
            out << "type = forward\n";
            break;
        case ClaimKind::EquityTrs:
            out << "type = equity_trs\n";
            break;
        case ClaimKind::Cds:
            out << "type = cds\n";
            break;
        case ClaimKind::BondTrs:
            out << "type = bond_trs\n";
            break;
    }
    emit("maturity", spec.claim.maturity);
    switch (spec.claim.kind) {
        case ClaimKind::CallSpread:
            emit("strike", spec.claim.spread.strike);
            emit("eps_lo", spec.claim.spread.eps_lo);
            emit("eps_hi", spec.claim.spread.eps_hi);
            emit("m_lo", spec.claim.spread.m_lo);
            emit("m_hi", spec.claim.spread.m_hi);
            break;
        case ClaimKind::Forward:
            emit("f0", spec.claim.f0);
            break;
        case ClaimKind::EquityTrs:
            emit("s0", spec.claim.s0);
            emit("premium", spec.claim.premium);
            break;
        case ClaimKind::Cds:
            emit("premium", spec.claim.premium);
            break;
        case ClaimKind::BondTrs:
            emit("premium", spec.claim.premium);
            emit("bond_maturity", spec.claim.bond_maturity);
            emit("x0", spec.claim.x0);
            if (spec.claim.strike) {
                emit("strike", *spec.claim.strike);
            }
            break;
    }

    out << "\n[parties]\n";
    emit("lambda1", spec.party1.intensity);
    emit("lambda2", spec.party2.intensity);
    emit("loss_rate1", spec.party1.loss_rate);
    emit("loss_rate2", spec.party2.loss_rate);
    emit("delta1", spec.party1.collateral_ratio);
    emit("delta2", spec.party2.collateral_ratio);
    emit("c1", spec.party1.collateral_rate);
    emit("c2", spec.party2.collateral_rate);

    out << "\n[grid]\n";
    emit("x_min", spec.grid.x_min);
    emit("x_max", spec.grid.x_max);
    emit("dx", spec.grid.dx);
    emit("t_max", spec.grid.t_max);
    emit("dt", spec.grid.dt);

    out << "\n[solver]\n";
    emit("tolerance", spec.solver.tolerance);
    emit("max_iter", spec.solver.max_iter);
    out << "scheme = "
        << (spec.solver.scheme == IterationScheme::ImplicitLinear ? "implicit_linear"
                                                                  : "explicit_source")
        << "\n";
    if (spec.solver.error_slice_time) {
        emit("error_slice_time", *spec.solver.error_slice_time);
    }
    switch (spec.solver.sides) {
        case SideRequest::Buyer:
            out << "sides = buyer\n";
            break;
        case SideRequest::Seller:
            out << "sides = seller\n";
            break;
        case SideRequest::Both:
            out << "sides = both\n";
            break;
    }

    out << "\n[output]\n";
    emit("probe_t", spec.output.probe_t);
    if (!spec.output.probes.empty()) {
        out << "probes = ";
        for (std::size_t i = 0; i < spec.output.probes.size(); ++i) {
            out << (i > 0 ? ", " : "") << format_number(spec.output.probes[i]);
        }
        out << "\n";
    }

    if (spec.sweep) {
        out << "\n[sweep]\n";
        out << "parameter = " << spec.sweep->parameter << "\n";
        out << "values = ";
        for (std::size_t i = 0; i < spec.sweep->values.size(); ++i) {
            out << (i > 0 ? ", " : "") << format_number(spec.sweep->values[i]);
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace xva::cli
