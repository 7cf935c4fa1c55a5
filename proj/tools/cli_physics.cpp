#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "cli_internal.hpp"
#include "qcomm/detectors.hpp"
#include "qcomm/error.hpp"
#include "qcomm/gaussian_fit.hpp"
#include "qcomm/photon_io.hpp"
#include "qcomm/photon_stats.hpp"
#include "qcomm/spdc.hpp"
#include "qcomm/tomography.hpp"

namespace qcomm::cli {

namespace {

using nlohmann::json;

Eigen::Vector3d parse_direction(const std::string& s) {
  if (s == "x") return Eigen::Vector3d::UnitX();
  if (s == "y") return Eigen::Vector3d::UnitY();
  if (s == "z") return Eigen::Vector3d::UnitZ();
  std::vector<double> v;
  std::stringstream ss(s);
  for (std::string part; std::getline(ss, part, ',');) {
    try {
      v.push_back(std::stod(part));
    } catch (const std::exception&) {
      throw ValidationError("direction '" + s + "' must be x, y, z or three comma-separated numbers");
    }
  }
  require(v.size() == 3, "direction '" + s + "' must have three components");
  return {v[0], v[1], v[2]};
}

spdc::CrystalPreset find_crystal(const std::string& file, const std::string& name) {
  auto presets = spdc::load_crystal_presets_file(file);
  const auto it = presets.find(name);
  require(it != presets.end(), "crystal '" + name + "' not found in '" + file + "'");
  return it->second;
}

void add_spdc(CLI::App& app, Context& ctx) {
  auto* spdc_cmd = app.add_subcommand("spdc", "SPDC design calculations");
  spdc_cmd->require_subcommand(1);

  {
    struct Opts { double pump = 0, signal = 0, pump_unc = 0, signal_unc = 0; std::string out; };
    auto o = std::make_shared<Opts>();
    auto* c = spdc_cmd->add_subcommand("idler", "Idler wavelength from energy conservation");
    c->add_option("--pump", o->pump, "Pump wavelength, nm")->required();
    c->add_option("--signal", o->signal, "Signal wavelength, nm")->required();
    c->add_option("--pump-unc", o->pump_unc, "Pump uncertainty, nm")->capture_default_str();
    c->add_option("--signal-unc", o->signal_unc, "Signal uncertainty, nm")->capture_default_str();
    c->add_option("--out", o->out, "Output JSON (stdout if omitted)");
    c->callback([&ctx, o] {
      const auto p = spdc::WavelengthNm::make(o->pump, o->pump_unc);
      const auto s = spdc::WavelengthNm::make(o->signal, o->signal_unc);
      const auto i = spdc::idler_wavelength(p, s);
      emit_json(ctx, o->out, {{"lambda_p_nm", p.value}, {"lambda_s_nm", s.value},
                              {"lambda_i_nm", i.value}, {"d_lambda_i_nm", spdc::idler_uncertainty(p, s)}});
    });
  }
  {
    struct Opts {
      double delta_k = 0; int order = 1;
      std::string crystals, crystal, pump_pol = "H";
      double pump = 0, signal = 0;
      std::string out;
    };
    auto o = std::make_shared<Opts>();
    auto* c = spdc_cmd->add_subcommand("poling", "Quasi-phase-matching poling period");
    auto* dk = c->add_option("--delta-k", o->delta_k, "Phase mismatch, 1/um");
    c->add_option("--order", o->order, "QPM order m")->capture_default_str();
    auto* cr = c->add_option("--crystals", o->crystals, "Crystal preset JSON")->check(CLI::ExistingFile);
    c->add_option("--crystal", o->crystal, "Preset name")->needs(cr);
    c->add_option("--pump-pol", o->pump_pol, "Pump polarization H or V")->capture_default_str();
    c->add_option("--pump", o->pump, "Pump wavelength, nm")->needs(cr);
    c->add_option("--signal", o->signal, "Signal wavelength, nm")->needs(cr);
    dk->excludes(cr);
    c->add_option("--out", o->out, "Output JSON (stdout if omitted)");
    c->callback([&ctx, o, dk, cr] {
      json j;
      double delta_k = o->delta_k;
      if (cr->count() > 0) {
        require(!o->crystal.empty() && o->pump > 0 && o->signal > 0,
                "--crystals needs --crystal, --pump and --signal");
        const auto preset = find_crystal(o->crystals, o->crystal);
        const auto idler = spdc::idler_wavelength(spdc::WavelengthNm::make(o->pump),
                                                  spdc::WavelengthNm::make(o->signal));
        delta_k = spdc::phase_mismatch_per_um(preset, spdc::parse_polarization(o->pump_pol), o->pump,
                                              o->signal, idler.value);
        j["crystal"] = o->crystal;
        j["lambda_i_nm"] = idler.value;
        j["qpm_residual_per_um"] = spdc::qpm_residual(delta_k, preset.crystal);
      } else {
        require(dk->count() > 0, "give --delta-k or --crystals/--crystal/--pump/--signal");
      }
      j["delta_k_per_um"] = delta_k;
      j["qpm_order"] = o->order;
      j["poling_period_um"] = spdc::required_poling_period(delta_k, o->order);
      emit_json(ctx, o->out, j);
    });
  }
  {
    struct Opts { std::string in; double pump = 0, sig_start = 0, sig_stop = 0, sig_step = 1; std::string out; };
    auto o = std::make_shared<Opts>();
    auto* c = spdc_cmd->add_subcommand("tuning", "Idler tuning curve (CSV)");
    auto* in = c->add_option("--in", o->in, "CSV with lambda_p_nm,lambda_s_nm[,d_lambda_p_nm,d_lambda_s_nm]")
                   ->check(CLI::ExistingFile);
    auto* pump = c->add_option("--pump", o->pump, "Fixed pump wavelength for a signal sweep, nm");
    c->add_option("--signal-start", o->sig_start, "Sweep start, nm")->needs(pump);
    c->add_option("--signal-stop", o->sig_stop, "Sweep stop, nm")->needs(pump);
    c->add_option("--signal-step", o->sig_step, "Sweep step, nm")->needs(pump)->capture_default_str();
    in->excludes(pump);
    c->add_option("--out", o->out, "Output CSV (stdout if omitted)");
    c->callback([&ctx, o, in] {
      std::vector<spdc::WavelengthNm> pumps, signals;
      if (in->count() > 0) {
        std::istringstream ss(read_text_file(o->in));
        std::string line;
        for (int row = 0; std::getline(ss, line); ++row) {
          if (line.empty() || line.front() == '#' || (row == 0 && line.find("lambda") != std::string::npos)) continue;
          std::vector<double> v;
          std::stringstream ls(line);
          for (std::string cell; std::getline(ls, cell, ',');) {
            try {
              v.push_back(std::stod(cell));
            } catch (const std::exception&) {
              throw ValidationError("tuning CSV line " + std::to_string(row + 1) + ": bad number '" + cell + "'");
            }
          }
          require(v.size() == 2 || v.size() == 4, "tuning CSV line " + std::to_string(row + 1) +
                                                       ": expected 2 or 4 columns");
          pumps.push_back(spdc::WavelengthNm::make(v[0], v.size() == 4 ? v[2] : 0.0));
          signals.push_back(spdc::WavelengthNm::make(v[1], v.size() == 4 ? v[3] : 0.0));
        }
      } else {
        require(o->pump > 0 && o->sig_step > 0 && o->sig_stop >= o->sig_start,
                "sweep needs --pump, --signal-start <= --signal-stop and --signal-step > 0");
        const auto n = static_cast<std::size_t>(std::floor((o->sig_stop - o->sig_start) / o->sig_step + 1e-9)) + 1;
        for (std::size_t k = 0; k < n; ++k) {
          pumps.push_back(spdc::WavelengthNm::make(o->pump));
          signals.push_back(spdc::WavelengthNm::make(o->sig_start + static_cast<double>(k) * o->sig_step));
        }
      }
      require(!pumps.empty(), "tuning input has no rows");
      const auto points = spdc::tuning_curve(pumps, signals);
      std::ostringstream csv;
      spdc::write_tuning_csv(csv, points);
      emit(ctx, "--out", o->out, csv.str());
    });
  }
  {
    struct Opts { std::string crystals, crystal, pump_dir = "z", signal_dir = "z", idler_dir = "y", out; };
    auto o = std::make_shared<Opts>();
    auto* c = spdc_cmd->add_subcommand("deff", "Effective nonlinearity of a crystal preset");
    c->add_option("--crystals", o->crystals, "Crystal preset JSON")->required()->check(CLI::ExistingFile);
    c->add_option("--crystal", o->crystal, "Preset name")->required();
    c->add_option("--pump-dir", o->pump_dir, "Pump polarization: x, y, z or a,b,c")->capture_default_str();
    c->add_option("--signal-dir", o->signal_dir, "Signal polarization")->capture_default_str();
    c->add_option("--idler-dir", o->idler_dir, "Idler polarization")->capture_default_str();
    c->add_option("--out", o->out, "Output JSON (stdout if omitted)");
    c->callback([&ctx, o] {
      const auto preset = find_crystal(o->crystals, o->crystal);
      const double d = spdc::effective_nonlinearity(preset.crystal.d_contracted, parse_direction(o->pump_dir),
                                                    parse_direction(o->signal_dir), parse_direction(o->idler_dir));
      const double g = spdc::fourier_coefficient(preset.crystal.qpm_order, preset.crystal.duty_cycle);
      emit_json(ctx, o->out, {{"crystal", o->crystal}, {"d_eff_pm_per_v", d}, {"fourier_coefficient", g},
                              {"d_qpm_pm_per_v", d * g}});
    });
  }
}

photon::DetectorSpec detector_for(const std::string& id, const std::string& overrides, double wavelength_nm,
                                  std::ostream& err) {
  if (id.empty() || id == "ideal") return {};
  detectors::Catalog catalog = detectors::Catalog::builtin();
  if (!overrides.empty()) catalog.merge(detectors::Catalog::parse_file(overrides));
  const auto slash = id.find('/');
  require(slash != std::string::npos, "detector preset id must be FAMILY/variant or 'ideal'");
  const auto& preset = catalog.find(detectors::parse_family(id.substr(0, slash)), id.substr(slash + 1));
  if (wavelength_nm > 0) {
    const auto check = detectors::validate_for_wavelength(preset, spdc::WavelengthNm::make(wavelength_nm));
    if (!check.ok) err << "warning: " << check.diagnostic << "\n";
  }
  return preset.spec;
}

void add_sim(CLI::App& app, Context& ctx) {
  auto* sim = app.add_subcommand("sim", "Photon-pair source and detector simulation");
  sim->require_subcommand(1);
  {
    struct Opts {
      double mu = 0.05, period_ns = 12.5, t_a = 1.0, t_b = 1.0, lambda_a = 0, lambda_b = 0;
      std::uint64_t pulses = 0, seed = 0;
      std::string det_a, det_b, detectors, format = "csv", stats = "poisson", out;
    };
    auto o = std::make_shared<Opts>();
    auto* c = sim->add_subcommand("streams", "Simulate two time-tag streams");
    c->add_option("--mu", o->mu, "Mean pairs per pulse")->capture_default_str();
    c->add_option("--pulses", o->pulses, "Number of pump pulses")->required();
    c->add_option("--period-ns", o->period_ns, "Pulse period, ns")->capture_default_str();
    c->add_option("--statistics", o->stats, "poisson or fixed")->capture_default_str();
    c->add_option("--transmission-a", o->t_a, "Arm A transmission")->capture_default_str();
    c->add_option("--transmission-b", o->t_b, "Arm B transmission")->capture_default_str();
    c->add_option("--detector-a", o->det_a, "Preset FAMILY/variant or 'ideal'");
    c->add_option("--detector-b", o->det_b, "Preset FAMILY/variant or 'ideal'");
    c->add_option("--detectors", o->detectors, "Detector catalog overrides (JSON)")->check(CLI::ExistingFile);
    c->add_option("--wavelength-a", o->lambda_a, "Arm A wavelength for preset range checks, nm");
    c->add_option("--wavelength-b", o->lambda_b, "Arm B wavelength for preset range checks, nm");
    c->add_option("--format", o->format, "csv or bin")->check(CLI::IsMember({"csv", "bin"}))->capture_default_str();
    c->add_option("--seed", o->seed, "RNG seed")->required();
    c->add_option("--out", o->out, "Output file")->required();
    c->callback([&ctx, o] {
      photon::PulseTrainSpec pulses;
      pulses.mean_pairs_per_pulse = o->mu;
      pulses.n_pulses = o->pulses;
      pulses.period_ns = o->period_ns;
      require(o->stats == "poisson" || o->stats == "fixed", "--statistics must be poisson or fixed");
      pulses.statistics = o->stats == "fixed" ? photon::PairStatistics::Fixed : photon::PairStatistics::Poisson;
      if (pulses.above_recommended())
        ctx.err << "warning: mean pairs per pulse >= 1 is far from the single-pair regime\n";
      const std::array<photon::DetectorSpec, 2> dets = {
          detector_for(o->det_a, o->detectors, o->lambda_a, ctx.err),
          detector_for(o->det_b, o->detectors, o->lambda_b, ctx.err)};
      const auto streams = photon::simulate_streams(pulses, {o->t_a, o->t_b}, dets, o->seed);
      const std::array<photon::TimeTagStream, 2> both = {streams.a, streams.b};
      std::ostringstream buf(std::ios::binary | std::ios::out);
      if (o->format == "bin")
        photon::write_streams_binary(buf, both);
      else
        photon::write_streams_csv(buf, both);
      emit(ctx, "--out", o->out, buf.str());
    });
  }
  {
    struct Opts { std::string in, out; std::int64_t bin_ps = 16, window_ps = 40000; int ch_a = 0, ch_b = 1; };
    auto o = std::make_shared<Opts>();
    auto* c = sim->add_subcommand("histogram", "Coincidence histogram of two streams");
    c->add_option("--in", o->in, "Streams file (CSV or binary)")->required()->check(CLI::ExistingFile);
    c->add_option("--bin-ps", o->bin_ps, "Bin width, ps")->capture_default_str();
    c->add_option("--window-ps", o->window_ps, "Half window, ps")->capture_default_str();
    c->add_option("--channel-a", o->ch_a, "Start channel")->capture_default_str();
    c->add_option("--channel-b", o->ch_b, "Stop channel")->capture_default_str();
    c->add_option("--out", o->out, "Output JSON (stdout if omitted)");
    c->callback([&ctx, o] {
      const auto streams = photon::read_streams_file(o->in);
      const photon::TimeTagStream* a = nullptr;
      const photon::TimeTagStream* b = nullptr;
      for (const auto& s : streams) {
        if (s.channel == o->ch_a) a = &s;
        if (s.channel == o->ch_b) b = &s;
      }
      require(a && b, "streams file lacks channel " + std::to_string(a ? o->ch_b : o->ch_a));
      emit_json(ctx, o->out, photon::to_json(photon::build_histogram(*a, *b, o->bin_ps, o->window_ps)));
    });
  }
  {
    struct Opts {
      double mu = 0.05, herald = 1.0, arm = 1.0;
      std::uint64_t pulses = 0, seed = 0;
      std::string source = "spdc", out;
    };
    auto o = std::make_shared<Opts>();
    auto* c = sim->add_subcommand("g2", "Heralded g2(0) with a 50:50 splitter");
    c->add_option("--mu", o->mu, "Mean pairs (or photons) per pulse")->capture_default_str();
    c->add_option("--pulses", o->pulses, "Number of pulses")->required();
    c->add_option("--herald-eff", o->herald, "Herald arm efficiency")->capture_default_str();
    c->add_option("--arm-eff", o->arm, "Efficiency of each split arm")->capture_default_str();
    c->add_option("--source", o->source, "spdc or coherent")->check(CLI::IsMember({"spdc", "coherent"}))
        ->capture_default_str();
    c->add_option("--seed", o->seed, "RNG seed")->required();
    c->add_option("--out", o->out, "Output JSON (stdout if omitted)");
    c->callback([&ctx, o] {
      photon::PulseTrainSpec pulses;
      pulses.mean_pairs_per_pulse = o->mu;
      pulses.n_pulses = o->pulses;
      photon::HeraldSetup setup{o->herald, o->arm,
                                o->source == "coherent" ? photon::LightSource::Coherent : photon::LightSource::Spdc};
      const auto counts = photon::simulate_heralded_counts(pulses, setup, o->seed);
      json j = photon::to_json(counts);
      j["g2"] = (counts.n_ab && counts.n_ac) ? json(photon::heralded_g2(counts)) : json();
      j["mu"] = o->mu;
      j["source"] = o->source;
      emit_json(ctx, o->out, j);
    });
  }
}

void add_fit(CLI::App& app, Context& ctx) {
  struct Opts { std::string in, out; double half_window = 0; int max_iter = 200; };
  auto o = std::make_shared<Opts>();
  auto* c = app.add_subcommand("fit", "Gaussian fit of a coincidence histogram and its SNR");
  c->add_option("--in", o->in, "Histogram JSON")->required()->check(CLI::ExistingFile);
  auto* hw = c->add_option("--half-window-ps", o->half_window, "Fit only bins within this distance of the peak");
  c->add_option("--max-iterations", o->max_iter, "Levenberg-Marquardt iteration cap")->capture_default_str();
  c->add_option("--out", o->out, "Output JSON (stdout if omitted)");
  c->callback([&ctx, o, hw] {
    const auto h = photon::histogram_from_json(read_json_file(o->in));
    photon::FitOptions opts;
    opts.max_iterations = o->max_iter;
    if (hw->count() > 0) opts.half_window_ps = o->half_window;
    const auto fit = photon::fit_gaussian(h, photon::initial_guess(h), opts);
    json j = photon::to_json(fit);
    j["snr"] = fit.b > 0 ? json(photon::snr(fit)) : json();
    emit_json(ctx, o->out, j);
    if (!fit.converged) ctx.err << "warning: fit did not converge\n";
  });
}

void add_calibrate(CLI::App& app, Context& ctx) {
  struct Opts {
    std::uint64_t n_s = 0, n_i = 0, n_c = 0, pairs = 0, seed = 0;
    double eta_s = 0, eta_i = 0;
    std::string out;
  };
  auto o = std::make_shared<Opts>();
  auto* c = app.add_subcommand("calibrate", "Klyshko absolute efficiency calibration");
  auto* ns = c->add_option("--n-s", o->n_s, "Signal singles");
  auto* ni = c->add_option("--n-i", o->n_i, "Idler singles");
  auto* nc = c->add_option("--n-c", o->n_c, "Coincidences");
  auto* sim = c->add_option("--simulate-pairs", o->pairs, "Simulate this many pairs instead of reading counts");
  c->add_option("--eta-s", o->eta_s, "True signal efficiency (simulation)")->needs(sim);
  c->add_option("--eta-i", o->eta_i, "True idler efficiency (simulation)")->needs(sim);
  auto* seed = c->add_option("--seed", o->seed, "RNG seed (simulation)")->needs(sim);
  sim->needs(seed);
  sim->excludes(ns)->excludes(ni)->excludes(nc);
  c->add_option("--out", o->out, "Output JSON (stdout if omitted)");
  c->callback([&ctx, o, sim] {
    photon::KlyshkoCounts k{o->n_s, o->n_i, o->n_c};
    json j;
    if (sim->count() > 0) {
      k = photon::simulate_pair_thinning(o->pairs, o->eta_s, o->eta_i, o->seed);
      j["pairs"] = o->pairs;
      j["true_eta_s"] = o->eta_s;
      j["true_eta_i"] = o->eta_i;
    }
    const auto eff = photon::klyshko_calibrate(k.n_s, k.n_i, k.n_c);
    j["n_s"] = k.n_s;
    j["n_i"] = k.n_i;
    j["n_c"] = k.n_c;
    j["eta_s"] = eff.signal;
    j["eta_i"] = eff.idler;
    j["sigma_eta_s"] = std::sqrt(eff.signal * (1 - eff.signal) / static_cast<double>(k.n_i));
    j["sigma_eta_i"] = std::sqrt(eff.idler * (1 - eff.idler) / static_cast<double>(k.n_s));
    emit_json(ctx, o->out, j);
  });
}

qstate::DensityMatrix parse_state(const std::string& name) {
  using qstate::BellLabel;
  if (name.rfind("werner:", 0) == 0) {
    try {
      return qstate::werner(std::stod(name.substr(7)));
    } catch (const std::invalid_argument&) {
      throw ValidationError("bad Werner weight in '" + name + "'");
    }
  }
  if (name == "phi+") return qstate::DensityMatrix::from_pure(qstate::bell_state(BellLabel::PhiPlus));
  if (name == "phi-") return qstate::DensityMatrix::from_pure(qstate::bell_state(BellLabel::PhiMinus));
  if (name == "psi+") return qstate::DensityMatrix::from_pure(qstate::bell_state(BellLabel::PsiPlus));
  if (name == "psi-") return qstate::DensityMatrix::from_pure(qstate::bell_state(BellLabel::PsiMinus));
  if (name == "hh") return qstate::DensityMatrix::from_pure(qstate::PureState::basis(2, 0));
  if (name == "mixed") return qstate::DensityMatrix::maximally_mixed(4);
  throw ValidationError("unknown state '" + name + "' (phi+, phi-, psi+, psi-, hh, mixed, werner:P)");
}

void add_tomo(CLI::App& app, Context& ctx) {
  auto* tomo = app.add_subcommand("tomo", "Two-qubit polarization tomography");
  tomo->require_subcommand(1);
  {
    struct Opts { std::string state = "phi+", out; std::uint64_t n_ref = 10000, seed = 0; bool noiseless = false; };
    auto o = std::make_shared<Opts>();
    auto* c = tomo->add_subcommand("simulate", "Coincidence counts for the 16 canonical settings");
    c->add_option("--state", o->state, "phi+, phi-, psi+, psi-, hh, mixed or werner:P")->capture_default_str();
    c->add_option("--n-ref", o->n_ref, "Reference count N")->capture_default_str();
    auto* noiseless = c->add_flag("--noiseless", o->noiseless, "Rounded expectations instead of Poisson draws");
    auto* seed = c->add_option("--seed", o->seed, "RNG seed (required unless --noiseless)");
    seed->excludes(noiseless);
    c->add_option("--out", o->out, "Output JSON (stdout if omitted)");
    c->callback([&ctx, o, seed] {
      const auto rho = parse_state(o->state);
      require(o->noiseless || seed->count() > 0, "--seed is required for Poisson sampling");
      const auto records = o->noiseless ? qstate::noiseless_tomography(rho, o->n_ref)
                                        : qstate::simulate_tomography(rho, o->n_ref, o->seed);
      json j = qstate::to_json(records);
      j["state"] = o->state;
      emit_json(ctx, o->out, j);
    });
  }
  {
    struct Opts { std::string in, target = "phi+", out; int max_iter = 10000; double tol = 1e-10; };
    auto o = std::make_shared<Opts>();
    auto* c = tomo->add_subcommand("reconstruct", "Maximum-likelihood density matrix");
    c->add_option("--in", o->in, "Tomography records JSON")->required()->check(CLI::ExistingFile);
    c->add_option("--target", o->target, "Reference state for the fidelity")->capture_default_str();
    c->add_option("--max-iterations", o->max_iter, "Iteration cap")->capture_default_str();
    c->add_option("--tolerance", o->tol, "Log-likelihood gain threshold")->capture_default_str();
    c->add_option("--out", o->out, "Output JSON (stdout if omitted)");
    c->callback([&ctx, o] {
      const auto records = qstate::records_from_json(read_json_file(o->in));
      const auto result = qstate::mle_reconstruct(records, {o->max_iter, o->tol, false});
      const auto target = parse_state(o->target);
      json j = {{"rho", qstate::to_json(result.rho)},
                {"converged", result.converged},
                {"iterations", result.iterations},
                {"log_likelihood", result.log_likelihood},
                {"clipped_mass", result.clipped_mass},
                {"target", o->target},
                {"fidelity", qstate::fidelity(result.rho, target)},
                {"concurrence", qstate::concurrence(result.rho)},
                {"bell_parameter", qstate::bell_parameter(result.rho)},
                {"purity", qstate::purity(result.rho)}};
      emit_json(ctx, o->out, j);
    });
  }
}

}  // namespace

void add_physics_commands(CLI::App& app, Context& ctx) {
  add_spdc(app, ctx);
  add_sim(app, ctx);
  add_fit(app, ctx);
  add_calibrate(app, ctx);
  add_tomo(app, ctx);
}

}  // namespace qcomm::cli
