// ngi: thermal-neutron ghost imaging laboratory CLI.
//
// Subcommands: simulate | mc | reconstruct | solve | tomo | validate | selftest
// Exit codes: 0 ok, 1 config, 2 statistics, 3 missing input, 4 flag misuse,
// 5 geometry.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "ngi/correlator.hpp"
#include "ngi/errors.hpp"
#include "ngi/fft.hpp"
#include "ngi/ngio.hpp"
#include "ngi/pipeline.hpp"
#include "ngi/propagation.hpp"
#include "ngi/reconstruct.hpp"
#include "ngi/rng.hpp"
#include "ngi/scene.hpp"
#include "ngi/spinor.hpp"
#include "ngi/threads.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ngi;

namespace {

struct GlobalOpts {
  std::string config;
  std::string out = "out";
  std::uint64_t seed = 0;
  int threads = 0;
  bool force = false;
};

void resolve_threads(const GlobalOpts& g) {
  int t = g.threads;
  if (t == 0) {
    if (const char* env = std::getenv("NGI_THREADS")) t = std::atoi(env);
  }
  set_thread_count(t);
}

Manifest start_manifest(const GlobalOpts& g, const std::string& command, const Scene* scene) {
  Manifest m;
  m.command = command;
  m.seed = g.seed;
  m.threads = thread_count();
  m.started_utc = utc_now_iso8601();
  if (!g.config.empty()) {
    m.config_digest = file_sha256(g.config);
    m.add_input(g.config);
  }
  if (scene) m.resolved_config = scene->to_json();
  return m;
}

void finish_manifest(Manifest& m, const std::string& out_dir) {
  m.finished_utc = utc_now_iso8601();
  m.write(out_dir + "/manifest.json");
}

std::string map_base(const std::string& dir, const ChannelId& ch) {
  return dir + "/map_" + channel_name(ch);
}

std::vector<ChannelId> scene_channels(const Scene& scene) {
  std::vector<ChannelId> out;
  for (const auto& ch : kChannels)
    for (auto p : scene.positions)
      if (ch.position == p) out.push_back(ch);
  return out;
}

void require_sampling(const Scene& scene, bool force, bool quadrature_needed) {
  if (!quadrature_needed) return;
  auto rep = validate_sampling(scene);
  if (!rep.all_pass() && !force)
    throw GeometryError("sampling validation failed (rerun with --force to override):\n" +
                        rep.table());
}

void write_simages(const Scene& scene, const std::string& dir) {
  fs::create_directories(dir);
  auto truth = truth_channel_images(scene);
  for (std::size_t c = 0; c < kChannels.size(); ++c) {
    const auto& img = truth[c];
    write_ngi(dir + "/s_" + channel_name(kChannels[c]) + ".ngi", {img.n0, img.n1},
              img.data.data());
  }
}

// -------------------------------------------------------------------------

int cmd_simulate(const GlobalOpts& g, const std::string& method, bool dump_simages) {
  Scene scene = load_scene(g.config);
  resolve_threads(g);
  fs::create_directories(g.out);
  Manifest man = start_manifest(g, "simulate", &scene);
  man.resolved_config["method"] = method;

  bool quad = method == "quadrature" || method == "both";
  bool closed = method == "closed_form" || method == "both";
  if (!quad && !closed) throw FlagError("--method must be quadrature, closed_form or both");
  require_sampling(scene, g.force, quad);

  for (const auto& ch : scene_channels(scene)) {
    if (closed) {
      CorrelationMap map = compute_map(scene, ch, Provenance::kClosedForm);
      std::string base = map_base(g.out, ch) + (quad ? "_closed_form" : "");
      map.write(base);
      man.add_output(base + ".ngi");
      man.add_output(base + ".json");
    }
    if (quad) {
      CorrelationMap map = compute_map(scene, ch, Provenance::kQuadrature);
      std::string base = map_base(g.out, ch) + (closed ? "_quadrature" : "");
      map.write(base);
      man.add_output(base + ".ngi");
      man.add_output(base + ".json");
    }
  }
  if (dump_simages) write_simages(scene, g.out + "/simages");
  finish_manifest(man, g.out);
  return 0;
}

int cmd_mc(const GlobalOpts& g, std::uint64_t n, const std::string& stats) {
  Scene scene = load_scene(g.config);
  resolve_threads(g);
  fs::create_directories(g.out);
  Manifest man = start_manifest(g, "mc", &scene);
  man.resolved_config["n_realizations"] = n;
  require_sampling(scene, g.force, true);

  bool want_f = stats == "fermion" || stats == "both";
  bool want_b = stats == "boson" || stats == "both";
  if (!want_f && !want_b) throw FlagError("--statistics must be fermion, boson or both");

  DeltaGrid grid = DeltaGrid::from_detector(scene.detector, scene.geom.dim);
  for (const auto& ch : scene_channels(scene)) {
    Vec3 khat = kappa_hat(scene.geom.theta, ch.position);
    SpinorVolume vol = sample_function(*scene.sample, khat, scene.beta(), ch.position);
    // one ensemble, both signs: fermion map is the negated exchange estimate
    CorrelationMap boson = speckle_mc(scene, vol, ch.spin, grid, n, Statistics::kBoson, g.seed);
    if (want_b) {
      std::string base = map_base(g.out, ch) + "_boson";
      boson.write(base);
      man.add_output(base + ".ngi");
    }
    if (want_f) {
      CorrelationMap fermion = boson;
      fermion.statistics = Statistics::kFermion;
      for (auto& v : fermion.values.data) v = -v;
      std::string base = map_base(g.out, ch) + "_fermion";
      fermion.write(base);
      man.add_output(base + ".ngi");
    }
  }
  finish_manifest(man, g.out);
  return 0;
}

int cmd_reconstruct(const GlobalOpts& g, const std::string& maps_dir, bool oracle_phase,
                    const std::string& truth_dir, int n_iter, int restarts, double beta_fb,
                    const std::string& constraint) {
  Scene scene = load_scene(g.config);
  resolve_threads(g);
  fs::create_directories(g.out);
  Manifest man = start_manifest(g, "reconstruct", &scene);

  if (oracle_phase && truth_dir.empty())
    throw FlagError("--oracle-phase requires --truth <dir of ground-truth s-images>");

  // Load the five maps; tolerate the _closed_form/_quadrature/_fermion
  // suffixes emitted by simulate and mc.
  std::array<CorrelationMap, 5> maps;
  std::vector<std::string> missing;
  for (std::size_t c = 0; c < kChannels.size(); ++c) {
    std::string base = maps_dir + "/map_" + channel_name(kChannels[c]);
    std::string found;
    for (const char* suffix : {"", "_closed_form", "_quadrature", "_fermion"}) {
      if (fs::exists(base + suffix + ".ngi")) {
        found = base + suffix;
        break;
      }
    }
    if (found.empty()) {
      missing.push_back(channel_name(kChannels[c]));
      continue;
    }
    maps[c] = read_correlation_map(found);
    man.add_input(found + ".ngi");
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw MissingInputError("missing correlation maps for channels: " + list);
  }

  std::array<Array2<cd>, 5> truth{};
  bool have_truth = !truth_dir.empty();
  if (have_truth) {
    for (std::size_t c = 0; c < kChannels.size(); ++c) {
      std::string path = truth_dir + "/s_" + channel_name(kChannels[c]) + ".ngi";
      NgiArray arr = read_ngi(path);
      if (arr.dtype != 2 || arr.dims.size() != 2)
        throw MissingInputError("truth s-image must be complex128 2D: " + path);
      truth[c] = Array2<cd>(arr.dims[0], arr.dims[1]);
      truth[c].data = arr.c128;
      man.add_input(path);
    }
  }

  std::array<Array2<cd>, 5> recovered{};
  json retrieval_info = json::object();
  for (std::size_t c = 0; c < kChannels.size(); ++c) {
    const std::string name = channel_name(kChannels[c]);
    MagnitudeImage mag = magnitude_from_correlation(maps[c], scene);
    if (mag.clamped_positive_excursion)
      fprintf(stderr, "warning: positive excursions clamped in %s map\n", name.c_str());
    MagnitudeFrame mf = magnitude_to_frame(mag);
    const std::size_t M0 = mf.frame.n0, M1 = mf.frame.n1;

    if (oracle_phase) {
      Array2<cd> truth_frame = embed_block(truth[c], M0, M1);
      recovered[c] = oracle_phase_object(mf, truth_frame);
    } else {
      // support: centered block of half the frame per axis
      SupportMask support;
      support.inside = Array2<std::uint8_t>(M0, M1, 0);
      Array2<cd> ones(M0 / 2, std::max<std::size_t>(M1 / 2, 1), cd(1.0));
      Array2<cd> mask = embed_block(ones, M0, M1);
      for (std::size_t i = 0; i < mask.size(); ++i)
        support.inside.data[i] = mask.data[i] != cd(0.0) ? 1 : 0;
      SupportMask shifted;
      shifted.inside = dft_shift(support.inside);

      PhaseRetrieveParams params;
      params.n_iter = n_iter;
      params.restarts = restarts;
      params.beta_feedback = beta_fb;
      params.seed = g.seed + c;
      params.constraint = constraint == "real_nonnegative"
                              ? RetrievalConstraint::kRealNonnegative
                              : RetrievalConstraint::kSupportOnly;
      RetrievalResult res = phase_retrieve(mf.frame, shifted, params);
      write_csv_trace(g.out + "/trace_" + name + ".csv", res.traces[res.best_restart]);
      man.add_output(g.out + "/trace_" + name + ".csv");
      retrieval_info[name] = {{"residual", res.residual},
                              {"best_restart", res.best_restart},
                              {"restart_residuals", res.restart_residuals}};
      double measure = M1 == 1 ? mf.frame_pitch : mf.frame_pitch * mf.frame_pitch;
      Array2<cd> obj(M0, M1);
      for (std::size_t i = 0; i < obj.size(); ++i) obj.data[i] = res.object.data[i] / measure;
      Array2<cd> centered = dft_shift(obj);
      if (have_truth) {
        Array2<cd> truth_frame = embed_block(truth[c], M0, M1);
        RegisterScore reg = register_and_score(centered, truth_frame);
        centered = apply_registration(centered, reg);
        retrieval_info[name]["aligned_nrmse"] = reg.nrmse;
      } else {
        retrieval_info[name]["ambiguity"] = "translation/global-phase/conjugate-flip unresolved";
      }
      recovered[c] = std::move(centered);
    }
    write_ngi(g.out + "/s_" + name + ".ngi", {recovered[c].n0, recovered[c].n1},
              recovered[c].data.data());
    man.add_output(g.out + "/s_" + name + ".ngi");
  }

  ComponentMaps comp = solve_components(recovered[0], recovered[1], recovered[2], recovered[3],
                                        recovered[4], scene.geom.theta, scene.beta());
  const Array2<double>* outs[5] = {&comp.Mx, &comp.My, &comp.Mz, &comp.A, &comp.residual};
  const char* names[5] = {"mx", "my", "mz", "a", "residual"};
  for (int i = 0; i < 5; ++i) {
    std::string base = g.out + "/component_" + names[i];
    write_ngi(base + ".ngi", {outs[i]->n0, outs[i]->n1}, outs[i]->data.data());
    write_pgm16(base + ".pgm", *outs[i]);
    man.add_output(base + ".ngi");
    man.add_output(base + ".pgm");
  }
  man.resolved_config["condition_number"] = comp.condition_number;
  if (!retrieval_info.empty()) man.resolved_config["retrieval"] = retrieval_info;

  if (have_truth) {
    // component NRMSE against truth projections embedded in the frame
    std::array<Array2<cd>, 5> w{};
    for (std::size_t c = 0; c < 5; ++c)
      w[c] = embed_block(truth[c], recovered[c].n0, recovered[c].n1);
    ComponentMaps want = solve_components(w[0], w[1], w[2], w[3], w[4], scene.geom.theta,
                                          scene.beta());
    auto nrmse = [](const Array2<double>& a, const Array2<double>& b) {
      double num = 0, den = 0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a.data[i] - b.data[i]) * (a.data[i] - b.data[i]);
        den += b.data[i] * b.data[i];
      }
      return den > 0 ? std::sqrt(num / den) : 0.0;
    };
    man.resolved_config["component_nrmse"] = {{"mx", nrmse(comp.Mx, want.Mx)},
                                              {"my", nrmse(comp.My, want.My)},
                                              {"mz", nrmse(comp.Mz, want.Mz)},
                                              {"a", nrmse(comp.A, want.A)}};
  }
  finish_manifest(man, g.out);
  return 0;
}

int cmd_solve(const GlobalOpts& g, const std::string& simages_dir,
              const std::string& dump_matrix) {
  Scene scene = load_scene(g.config);
  resolve_threads(g);
  fs::create_directories(g.out);
  Manifest man = start_manifest(g, "solve", &scene);

  if (!dump_matrix.empty()) {
    CoefficientMatrix cm = coefficient_matrix(scene.geom.theta);
    std::vector<cd> flat;
    std::string text;
    char buf[96];
    for (int r = 0; r < 5; ++r) {
      for (int c = 0; c < 4; ++c) {
        flat.push_back(cm.entries[r][c]);
        std::snprintf(buf, sizeof buf, "%+.15g%+.15gi ", cm.entries[r][c].real(),
                      cm.entries[r][c].imag());
        text += buf;
      }
      text += "\n";
    }
    write_ngi(dump_matrix + ".ngi", {5, 4}, flat.data());
    write_text_atomic(dump_matrix + ".txt", text);
    man.add_output(dump_matrix + ".ngi");
    man.add_output(dump_matrix + ".txt");
  }

  std::array<Array2<cd>, 5> imgs{};
  std::vector<std::string> missing;
  for (std::size_t c = 0; c < kChannels.size(); ++c) {
    std::string path = simages_dir + "/s_" + channel_name(kChannels[c]) + ".ngi";
    if (!fs::exists(path)) {
      missing.push_back(channel_name(kChannels[c]));
      continue;
    }
    NgiArray arr = read_ngi(path);
    imgs[c] = Array2<cd>(arr.dims[0], arr.dims[1]);
    imgs[c].data = arr.c128;
    man.add_input(path);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw MissingInputError("missing s-images for channels: " + list);
  }

  ComponentMaps comp = solve_components(imgs[0], imgs[1], imgs[2], imgs[3], imgs[4],
                                        scene.geom.theta, scene.beta());
  const Array2<double>* outs[5] = {&comp.Mx, &comp.My, &comp.Mz, &comp.A, &comp.residual};
  const char* names[5] = {"mx", "my", "mz", "a", "residual"};
  for (int i = 0; i < 5; ++i) {
    std::string base = g.out + "/component_" + names[i];
    write_ngi(base + ".ngi", {outs[i]->n0, outs[i]->n1}, outs[i]->data.data());
    man.add_output(base + ".ngi");
  }
  man.resolved_config["condition_number"] = comp.condition_number;
  finish_manifest(man, g.out);
  return 0;
}

int cmd_tomo(const GlobalOpts& g, const std::string& proj_root, const std::string& axis_str,
             const std::string& filter_str) {
  Scene scene = load_scene(g.config);
  resolve_threads(g);
  fs::create_directories(g.out);
  Manifest man = start_manifest(g, "tomo", &scene);

  RotationAxis axis = axis_str == "x" ? RotationAxis::kX : RotationAxis::kZ;
  if (axis_str != "x" && axis_str != "z") throw FlagError("--axis must be x or z");
  TomoFilter filter =
      filter_str == "shepp-logan" ? TomoFilter::kSheppLogan : TomoFilter::kRamLak;
  if (filter_str != "shepp-logan" && filter_str != "ram-lak")
    throw FlagError("--filter must be ram-lak or shepp-logan");

  // angle directories: <proj_root>/angle_*/ with meta.json and 5 s-images
  std::vector<fs::path> dirs;
  if (fs::exists(proj_root))
    for (const auto& e : fs::directory_iterator(proj_root))
      if (e.is_directory() && e.path().filename().string().rfind("angle_", 0) == 0)
        dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());
  if (dirs.size() < 2) throw MissingInputError("tomo: need >= 2 angle_* directories");

  std::vector<double> angles;
  std::vector<Array2<double>> proj_mx, proj_my, proj_mz, proj_a;
  for (const auto& dir : dirs) {
    json meta = read_json((dir / "meta.json").string());
    angles.push_back(meta.at("angle_rad").get<double>());
    std::array<Array2<cd>, 5> imgs{};
    for (std::size_t c = 0; c < kChannels.size(); ++c) {
      std::string path = (dir / ("s_" + channel_name(kChannels[c]) + ".ngi")).string();
      if (!fs::exists(path))
        throw MissingInputError("tomo: missing " + path);
      NgiArray arr = read_ngi(path);
      imgs[c] = Array2<cd>(arr.dims[0], arr.dims[1]);
      imgs[c].data = arr.c128;
    }
    // the lab-frame detector is fixed while the sample rotates, so the
    // matrix solve runs per angle before any back-projection
    ComponentMaps comp = solve_components(imgs[0], imgs[1], imgs[2], imgs[3], imgs[4],
                                          scene.geom.theta, scene.beta());
    auto to_sino = [&](Array2<double>& img) {
      if (axis == RotationAxis::kZ) return img;  // (x', z'): s axis first
      Array2<double> t(img.n1, img.n0);
      for (std::size_t i = 0; i < img.n0; ++i)
        for (std::size_t j = 0; j < img.n1; ++j) t.at(j, i) = img.at(i, j);
      return t;
    };
    proj_mx.push_back(to_sino(comp.Mx));
    proj_my.push_back(to_sino(comp.My));
    proj_mz.push_back(to_sino(comp.Mz));
    proj_a.push_back(to_sino(comp.A));
  }

  double pitch = scene.sample->pitch;
  const std::vector<Array2<double>>* stacks[4] = {&proj_mx, &proj_my, &proj_mz, &proj_a};
  const char* names[4] = {"mx", "my", "mz", "a"};
  for (int i = 0; i < 4; ++i) {
    Volume vol = tomo_fbp(*stacks[i], angles, filter, pitch, axis);
    std::string path = g.out + "/volume_" + names[i] + ".ngi";
    write_ngi(path, {vol.values.n0, vol.values.n1, vol.values.n2}, vol.values.data.data());
    man.add_output(path);
  }
  finish_manifest(man, g.out);
  return 0;
}

int cmd_validate(const GlobalOpts& g) {
  Scene scene = load_scene(g.config);
  auto rep = validate_sampling(scene);
  printf("%s", rep.table().c_str());
  if (!g.out.empty()) {
    fs::create_directories(g.out);
    write_json(g.out + "/sampling_report.json", rep.to_json());
  }
  return rep.all_pass() ? 0 : 5;
}

// Embedded invariant checks; exits nonzero on any failure.
int cmd_selftest() {
  int failures = 0;
  auto check = [&](const char* name, bool ok) {
    printf("%-44s %s\n", name, ok ? "PASS" : "FAIL");
    if (!ok) ++failures;
  };

  {
    auto b = Philox::rounds({0, 0, 0, 0}, 0, 0);
    check("philox known answer (zero key)",
          b[0] == 0x6627e8d5u && b[1] == 0xe169c58du && b[2] == 0xbc57ac4cu &&
              b[3] == 0x9b00dbd8u);
    auto c = Philox::rounds({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, 0xa4093822u,
                            0x299f31d0u);
    check("philox known answer (pi digits)",
          c[0] == 0xd16cfe09u && c[1] == 0x94fdccebu && c[2] == 0x5001e420u &&
              c[3] == 0x24126ea1u);
  }
  {
    // FFT against a direct DFT
    std::vector<cd> x(16), ref(16, cd(0.0));
    RngStream rng(7, 0);
    for (auto& v : x) v = cd(rng.uniform() - 0.5, rng.uniform() - 0.5);
    for (int k = 0; k < 16; ++k)
      for (int j = 0; j < 16; ++j)
        ref[k] += x[j] * std::exp(cd(0.0, kTwoPi * j * k / 16.0));
    std::vector<cd> y = x;
    fft::transform(y.data(), 16, +1);
    double err = 0;
    for (int k = 0; k < 16; ++k) err = std::max(err, std::abs(y[k] - ref[k]));
    check("fft matches direct dft", err < 1e-12);
  }
  {
    // Eq. 16 oracle on random draws
    RngStream rng(11, 0);
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
      double theta = 0.01 + 1.49 * rng.uniform();
      double mx = rng.uniform() - 0.5, my = rng.uniform() - 0.5, mz = rng.uniform() - 0.5;
      double a = rng.uniform() - 0.5, beta = 0.5 + rng.uniform();
      auto s = forward_S_vector(mx, my, mz, a, theta, beta);
      SampleGrid grid = SampleGrid::zeros(1, 1, 1, 1.0);
      grid.A.at(0, 0, 0) = a;
      grid.Mx.at(0, 0, 0) = mx;
      grid.My.at(0, 0, 0) = my;
      grid.Mz.at(0, 0, 0) = mz;
      cd got[5];
      int idx = 0;
      for (const auto& ch : kChannels) {
        auto vol = sample_function(grid, kappa_hat(theta, ch.position), beta, ch.position);
        got[idx++] = ch.spin == Spin::kUp ? vol.up.at(0, 0, 0) : vol.down.at(0, 0, 0);
      }
      for (int i = 0; i < 5; ++i) worst = std::max(worst, std::abs(got[i] - s[i]));
    }
    check("eq16 matrix vs spinor construction", worst < 1e-12);
  }
  {
    // NGI round trip through a temp file
    std::string path = (fs::temp_directory_path() / "ngi_selftest.ngi").string();
    std::vector<double> vals = {1.5, -2.25, 3.125, 0.0, 1e-300, 7.75};
    write_ngi(path, {2, 3}, vals.data());
    NgiArray arr = read_ngi(path);
    bool ok = arr.dtype == 1 && arr.dims.size() == 2 && arr.dims[0] == 2 && arr.dims[1] == 3;
    for (int i = 0; i < 6 && ok; ++i) ok = arr.f64[i] == vals[i];
    fs::remove(path);
    check("ngi array round trip", ok);
  }
  {
    // sha256 known answers
    check("sha256 known answers",
          sha256_hex(std::string("")) ==
                  "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855" &&
              sha256_hex(std::string("abc")) ==
                  "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  }
  {
    // fermionic sign on a tiny scene
    json cfg = {{"mode", "normalized"},
                {"geometry",
                 {{"lambda", 1.0}, {"d1", 4000.0}, {"d2", 4000.0}, {"theta", 0.05},
                  {"transverse_dim", 1}}},
                {"source", {{"extent", 512.0}, {"n_points", 64}, {"center", -199.79}}},
                {"detector", {{"extent", 64.0}, {"n_pixels", 17}, {"positions", {"P1"}}}},
                {"sample",
                 {{"pitch", 1.0},
                  {"dims", {16, 2, 1}},
                  {"phantom",
                   {{"kind", "gauss_bumps_1d"},
                    {"bumps", {{{"center", 0.0}, {"sigma", 4.0}, {"amp", 1.0}}}}}}}}};
    Scene sc = build_scene(cfg);
    auto map = compute_map(sc, kChannels[0], Provenance::kClosedForm);
    bool ok = true;
    for (double v : map.values.data) ok = ok && v <= 0.0;
    check("closed-form fermionic map nonpositive", ok);
  }
  printf(failures == 0 ? "all selftests passed\n" : "%d selftest(s) FAILED\n", failures);
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ngi: thermal-neutron Fourier-transform ghost imaging laboratory"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config, "scene configuration JSON")->envname("NGI_CONFIG");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--seed", g.seed, "RNG seed");
  app.add_option("--threads", g.threads, "worker threads (0 = NGI_THREADS or hardware)");
  app.add_flag("--force", g.force, "proceed despite sampling validation failures");

  auto* sim = app.add_subcommand("simulate", "compute correlation maps");
  std::string method = "closed_form";
  bool dump_simages = false;
  sim->add_option("--method", method, "quadrature | closed_form | both");
  sim->add_flag("--dump-simages", dump_simages, "also write forward-model s-images");

  auto* mc = app.add_subcommand("mc", "Monte Carlo speckle ensemble maps");
  std::uint64_t n_real = 10000;
  std::string stats = "both";
  mc->add_option("-n,--n-realizations", n_real, "ensemble size");
  mc->add_option("--statistics", stats, "fermion | boson | both");

  auto* rec = app.add_subcommand("reconstruct", "maps -> magnitudes -> phase -> components");
  std::string maps_dir, truth_dir, constraint = "real_nonnegative";
  bool oracle_phase = false;
  int n_iter = 2000, restarts = 8;
  double beta_fb = 0.9;
  rec->add_option("--maps", maps_dir, "directory of correlation maps")->required();
  rec->add_flag("--oracle-phase", oracle_phase, "use ground-truth Fourier phase");
  rec->add_option("--truth", truth_dir, "directory of ground-truth s-images");
  rec->add_option("--iters", n_iter, "retrieval iterations");
  rec->add_option("--restarts", restarts, "retrieval restarts");
  rec->add_option("--beta-feedback", beta_fb, "HIO feedback parameter");
  rec->add_option("--constraint", constraint, "support_only | real_nonnegative");

  auto* sol = app.add_subcommand("solve", "per-pixel component solve from s-images");
  std::string simages_dir, dump_matrix;
  sol->add_option("--simages", simages_dir, "directory of s-images");
  sol->add_option("--dump-matrix", dump_matrix, "write coefficient matrix (.ngi and .txt)");

  auto* tomo = app.add_subcommand("tomo", "solve-then-FBP over rotation angle sets");
  std::string proj_root, axis_str = "z", filter_str = "ram-lak";
  tomo->add_option("--projections", proj_root, "root of angle_* directories")->required();
  tomo->add_option("--axis", axis_str, "rotation axis: z | x");
  tomo->add_option("--filter", filter_str, "ram-lak | shepp-logan");

  app.add_subcommand("validate", "print the sampling validation report");
  app.add_subcommand("selftest", "run the embedded invariant suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(g, method, dump_simages);
    if (mc->parsed()) return cmd_mc(g, n_real, stats);
    if (rec->parsed())
      return cmd_reconstruct(g, maps_dir, oracle_phase, truth_dir, n_iter, restarts, beta_fb,
                             constraint);
    if (sol->parsed()) return cmd_solve(g, simages_dir, dump_matrix);
    if (tomo->parsed()) return cmd_tomo(g, proj_root, axis_str, filter_str);
    if (app.get_subcommand("validate")->parsed()) return cmd_validate(g);
    if (app.get_subcommand("selftest")->parsed()) return cmd_selftest();
  } catch (const Error& e) {
    json err{{"error", e.what()}, {"exit_code", e.exit_code()}};
    fprintf(stderr, "%s\n", err.dump().c_str());
    return e.exit_code();
  } catch (const std::exception& e) {
    json err{{"error", e.what()}, {"exit_code", 1}};
    fprintf(stderr, "%s\n", err.dump().c_str());
    return 1;
  }
  return 0;
}
