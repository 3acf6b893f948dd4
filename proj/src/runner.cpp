#include "xva/runner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "xva/analytic.hpp"

namespace xva::cli {

namespace {

std::string fmt(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.6g", value);
    return buffer;
}

void check_on_node(double value, double origin, double step, const std::string& what) {
    const double offset = (value - origin) / step;
    if (offset < -1e-9 || std::abs(offset - std::round(offset)) > 1e-7) {
        throw ValidationError(what + " " + fmt(value) + " does not land on a grid node");
    }
}

void check_probes(const RunSpec& spec) {
    if (spec.output.probes.empty()) {
        throw ValidationError("[output] must list at least one probe state");
    }
    check_on_node(spec.output.probe_t, 0.0, spec.grid.dt, "probe time");
    for (double p : spec.output.probes) {
        check_on_node(p, spec.grid.x_min, spec.grid.dx, "probe state");
    }
}

PricingProblem make_problem_with_parties(const RunSpec& spec, const PartyParams& p1,
                                         const PartyParams& p2) {
    const ClaimTriplet claim = spec.build_claim();
    if (spec.model.kind == ModelKind::Equity) {
        return make_equity_problem(spec.equity_model(), p1, p2, claim, spec.grid,
                                   spec.model.convention);
    }
    return make_factor_problem(spec.factor_model(), spec.model.r, p1, p2, claim, spec.grid);
}

SolverOptions make_options(const RunSpec& spec) {
    SolverOptions options;
    options.tolerance = spec.solver.tolerance;
    options.max_iter = spec.solver.max_iter;
    options.scheme = spec.solver.scheme;
    options.error_slice_time = spec.solver.error_slice_time;
    return options;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot open output file " + path.string());
    }
    out << content;
}

void write_metadata(const RunSpec& spec, Command command, const std::filesystem::path& out_dir) {
    static const char* const kNames[] = {"price", "converge-table", "sweep", "fair-forward"};
    std::ostringstream meta;
    meta << "command: " << kNames[static_cast<int>(command)] << "\n";
    meta << "engine: xva 1.0\n";
    meta << "config:\n" << serialize(spec);
    write_file(out_dir / "metadata.txt", meta.str());
}

std::string run_price(const RunSpec& spec) {
    check_probes(spec);
    const PricingProblem problem = make_problem_with_parties(spec, spec.party1, spec.party2);
    const SolverOptions options = make_options(spec);

    const fd::Surface crf = solve_crf(problem);
    const fd::Surface without_bid = solve_without_provision(problem, crf, Side::Buyer);
    const fd::Surface without_ask = solve_without_provision(problem, crf, Side::Seller);
    const BidAskResult with = bid_ask(problem, options);

    std::ostringstream csv;
    csv << "t,state,crf,without_bid,without_ask,with_bid,with_ask,spread\n";
    const double t = spec.output.probe_t;
    for (double state : spec.output.probes) {
        csv << fmt(t) << ',' << fmt(state) << ',' << fmt(crf.query(t, state)) << ','
            << fmt(without_bid.query(t, state)) << ',' << fmt(without_ask.query(t, state)) << ','
            << fmt(with.bid.query(t, state)) << ',' << fmt(with.ask.query(t, state)) << ','
            << fmt(with.spread.query(t, state)) << "\n";
    }
    return csv.str();
}

std::string run_converge_table(const RunSpec& spec) {
    check_probes(spec);
    const PricingProblem problem = make_problem_with_parties(spec, spec.party1, spec.party2);
    SolverOptions options = make_options(spec);
    options.probe = {{spec.output.probe_t, spec.output.probes.front()}};

    const Side side = spec.solver.sides == SideRequest::Seller ? Side::Seller : Side::Buyer;
    auto [surface, report] = solve_with_provision(problem, side, options);

    std::ostringstream csv;
    csv << "n,value_at_probe,sup_error\n";
    for (std::size_t n = 0; n < report.errors.size(); ++n) {
        csv << (n + 1) << ',' << fmt(report.probe_values[n]) << ',' << fmt(report.errors[n])
            << "\n";
    }
    return csv.str();
}

void apply_sweep_parameter(const std::string& name, double value, PartyParams& p1,
                           PartyParams& p2) {
    if (name == "lambda1") {
        p1.intensity = value;
    } else if (name == "lambda2") {
        p2.intensity = value;
    } else if (name == "delta1") {
        p1.collateral_ratio = value;
    } else if (name == "delta2") {
        p2.collateral_ratio = value;
    } else if (name == "c1") {
        p1.collateral_rate = value;
    } else if (name == "c2") {
        p2.collateral_rate = value;
    } else {
        throw ValidationError("unknown sweep parameter '" + name + "'");
    }
}

std::string run_sweep(const RunSpec& spec) {
    if (!spec.sweep) {
        throw ValidationError("sweep command requires a [sweep] section");
    }
    check_probes(spec);
    const SolverOptions options = make_options(spec);
    const double t = spec.output.probe_t;
    const double state = spec.output.probes.front();

    std::ostringstream csv;
    csv << "value,with_bid,with_ask,spread\n";
    for (double value : spec.sweep->values) {
        PartyParams p1 = spec.party1;
        PartyParams p2 = spec.party2;
        apply_sweep_parameter(spec.sweep->parameter, value, p1, p2);
        const PricingProblem problem = make_problem_with_parties(spec, p1, p2);
        const BidAskResult with = bid_ask(problem, options);
        const double bid = with.bid.query(t, state);
        const double ask = with.ask.query(t, state);
        csv << fmt(value) << ',' << fmt(bid) << ',' << fmt(ask) << ',' << fmt(ask - bid) << "\n";
    }
    return csv.str();
}

std::string run_fair_forward(const RunSpec& spec) {
    if (spec.claim.kind != ClaimKind::Forward) {
        throw ValidationError("fair-forward requires a forward claim");
    }
    check_probes(spec);
    ForwardSetup setup{
        .model = spec.equity_model(),
        .p1 = spec.party1,
        .p2 = spec.party2,
        .spot = spec.output.probes.front(),
        .maturity = spec.claim.maturity,
        .grid = spec.grid,
        .options = make_options(spec),
        .convention = spec.model.convention,
    };

    auto residual_at = [&](double root, Side side) {
        const ClaimTriplet claim = equity_forward(root, setup.model.r, setup.maturity);
        const PricingProblem problem = make_equity_problem(setup.model, setup.p1, setup.p2, claim,
                                                           setup.grid, setup.convention);
        auto [surface, report] = solve_with_provision(problem, side, setup.options);
        return surface.query(0.0, setup.spot);
    };

    std::ostringstream csv;
    csv << "side,root,residual\n";
    if (spec.solver.sides != SideRequest::Seller) {
        const double root = fair_forward_price(setup, Side::Buyer);
        csv << "buyer," << fmt(root) << ',' << fmt(residual_at(root, Side::Buyer)) << "\n";
    }
    if (spec.solver.sides != SideRequest::Buyer) {
        const double root = fair_forward_price(setup, Side::Seller);
        csv << "seller," << fmt(root) << ',' << fmt(residual_at(root, Side::Seller)) << "\n";
    }
    return csv.str();
}

}  // namespace

PricingProblem make_problem(const RunSpec& spec) {
    return make_problem_with_parties(spec, spec.party1, spec.party2);
}

std::filesystem::path run(const RunSpec& spec, Command command,
                          const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::string csv;
    std::filesystem::path file;
    switch (command) {
        case Command::Price:
            csv = run_price(spec);
            file = out_dir / "price.csv";
            break;
        case Command::ConvergeTable:
            csv = run_converge_table(spec);
            file = out_dir / "converge_table.csv";
            break;
        case Command::Sweep:
            csv = run_sweep(spec);
            file = out_dir / "sweep.csv";
            break;
        case Command::FairForward:
            csv = run_fair_forward(spec);
            file = out_dir / "fair_forward.csv";
            break;
    }
    write_file(file, csv);
    write_metadata(spec, command, out_dir);
    return file;
}

}  // namespace xva::cli
