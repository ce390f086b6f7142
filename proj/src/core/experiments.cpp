// SPDX-License-Identifier: Apache-2.0
//
// isac-toolkit: design and evaluation of integrated sensing and communication
// Copyright (C) 2026 isac-toolkit contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
#include "isac/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>

#include "isac/classical_design.hpp"
#include "isac/constellation_ae.hpp"
#include "isac/csv.hpp"
#include "isac/hybrid_pga.hpp"
#include "isac/metrics.hpp"
#include "isac/mi_mmse.hpp"
#include "isac/waveform_learn.hpp"

#ifndef ISAC_VERSION_STRING
#define ISAC_VERSION_STRING "0.0.0"
#endif

namespace isac::experiments
{
    using nlohmann::json;
    using config::ExperimentConfig;
    namespace fs = std::filesystem;

    namespace
    {
        // Fixed child-stream indices so adding a stage never shifts another stage's draws.
        enum Stream : std::uint64_t
        {
            s_dataset = 1,
            s_train,
            s_test,
            s_trials,
            s_dataset_alt,
            s_train_alt,
            s_validation,
            s_calibration,
        };

        struct Output
        {
            fs::path dir;
            RunRecord *record;

            io::CsvWriter csv(const std::string &name, const std::vector<std::string> &header)
            {
                record->files.push_back(name);
                return io::CsvWriter((dir / name).string(), header);
            }
        };

        std::string tag(double x)
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%g", x);
            return buf;
        }

        double mean(const std::vector<double> &v)
        {
            return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        }

        std::vector<double> linspace_step(double lo, double hi, double step)
        {
            const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
            std::vector<double> out(n);
            for (std::size_t i = 0; i < n; ++i)
                out[i] = lo + step * static_cast<double>(i);
            return out;
        }

        // ---------------------------------------------------------------- mi_mmse

        metrics::DiscreteInput named_input(const std::string &name)
        {
            if (name == "bpsk")
                return metrics::DiscreteInput::bpsk();
            if (name == "qpsk")
                return metrics::DiscreteInput::qpsk();
            if (name == "qam16")
            {
                std::vector<cdouble> pts;
                const double s = 1.0 / std::sqrt(10.0);
                for (int i : {-3, -1, 1, 3})
                    for (int q : {-3, -1, 1, 3})
                        pts.emplace_back(s * i, s * q);
                return metrics::DiscreteInput::uniform("qam16", pts);
            }
            fail("unknown input " + name);
        }

        void run_mi_mmse(const ExperimentConfig &cfg, Output &out)
        {
            const auto grid = linspace_step(cfg.real("snr_db_min"), cfg.real("snr_db_max"), cfg.real("snr_db_step"));
            metrics::MiMmseOptions opts;
            opts.gh_order = static_cast<int>(cfg.integer("gh_order"));
            opts.mc_seed = Rng::split_seed(cfg.seed, s_trials);
            const double h = cfg.real("fd_rel_step");

            auto csv = out.csv("mi_mmse.csv", {"snr_db", "input", "mi_nats", "mmse"});
            json &summary = out.record->summary;
            for (const auto &name : cfg.texts("inputs"))
            {
                double immse_err = 0.0;
                double min_mi_above_15 = std::numeric_limits<double>::infinity();
                for (double db : grid)
                {
                    const double snr = db_to_linear(db);
                    metrics::MiMmsePoint p;
                    double dmi = 0.0;
                    if (name == "gaussian")
                    {
                        p = metrics::gaussian_mi_mmse(snr);
                        dmi = (metrics::gaussian_mi_mmse(snr * (1 + h)).mutual_info -
                               metrics::gaussian_mi_mmse(snr * (1 - h)).mutual_info) /
                              (2 * h * snr);
                    }
                    else
                    {
                        const auto in = named_input(name);
                        p = metrics::awgn_mi_mmse(in, snr, opts);
                        dmi = (metrics::awgn_mi_mmse(in, snr * (1 + h), opts).mutual_info -
                               metrics::awgn_mi_mmse(in, snr * (1 - h), opts).mutual_info) /
                              (2 * h * snr);
                    }
                    immse_err = std::max(immse_err, std::abs(dmi - p.mmse));
                    if (db > 15.0)
                        min_mi_above_15 = std::min(min_mi_above_15, p.mutual_info / std::log(2.0));
                    csv.row({db, name, p.mutual_info, p.mmse});
                }
                summary["immse_max_abs_error." + name] = immse_err;
                if (std::isfinite(min_mi_above_15))
                    summary["min_mi_bits_above_15db." + name] = min_mi_above_15;
            }
            csv.close();
        }

        // ---------------------------------------------------------------- Case I

        wavenet::WaveformScenario scenario_of(const ExperimentConfig &cfg, int users, wavenet::ReferenceKind ref)
        {
            wavenet::WaveformScenario sc;
            sc.num_antennas = static_cast<int>(cfg.integer("num_antennas"));
            sc.num_users = users;
            sc.frame_length = static_cast<int>(cfg.integer("frame_length"));
            sc.total_power = cfg.real("total_power");
            sc.rician_lo = cfg.real("rician_min");
            sc.rician_hi = cfg.real("rician_max");
            sc.reference = ref;
            return sc;
        }

        wavenet::WaveformTrainOptions train_options(const ExperimentConfig &cfg, std::uint64_t seed)
        {
            wavenet::WaveformTrainOptions o;
            o.train.epochs = static_cast<int>(cfg.integer("epochs"));
            o.train.batch_size = static_cast<int>(cfg.integer("batch_size"));
            o.train.lr = cfg.real("lr");
            const auto patience = cfg.integer("patience");
            o.train.early_stop_patience = patience > 0 ? std::optional<int>(static_cast<int>(patience)) : std::nullopt;
            o.train.seed = seed;
            o.total_power = cfg.real("total_power");
            o.augment = cfg.flag("augment");
            return o;
        }

        std::vector<wavenet::WaveformSample> waveform_dataset(const ExperimentConfig &cfg,
                                                              const wavenet::WaveformGenerator &gen, std::uint64_t seed,
                                                              const std::string &cache)
        {
            const auto count = static_cast<std::size_t>(cfg.integer("samples"));
            if (!cache.empty() && fs::exists(cache))
            {
                auto ds = wavenet::load_dataset(cache);
                const auto &s = gen.scenario();
                if (ds.size() == count && !ds.empty() && ds.front().num_antennas() == s.num_antennas &&
                    ds.front().num_users() == s.num_users && ds.front().frame_length() == s.frame_length)
                    return ds;
                throw Error(ErrorKind::io, "dataset cache " + cache + " does not match the configured scenario");
            }
            auto ds = gen.dataset(count, seed, cfg.threads);
            if (!cache.empty())
                wavenet::save_dataset(cache, ds);
            return ds;
        }

        struct TrainedNet
        {
            wavenet::WaveformTrainResult result;
            std::vector<wavenet::WaveformSample> dataset;
            std::vector<wavenet::WaveformSample> test; // first test_channels of the test split
        };

        TrainedNet train_net(const ExperimentConfig &cfg, const wavenet::WaveformGenerator &gen, double eta,
                             std::uint64_t data_stream, std::uint64_t train_stream, const std::string &cache)
        {
            TrainedNet t;
            t.dataset = waveform_dataset(cfg, gen, Rng::split_seed(cfg.seed, data_stream), cache);
            t.result = wavenet::train_waveform_net(t.dataset, eta, train_options(cfg, Rng::split_seed(cfg.seed, train_stream)));
            const auto n = std::min<std::size_t>(static_cast<std::size_t>(cfg.integer("test_channels")),
                                                 t.result.test_rows.size());
            for (std::size_t i = 0; i < n; ++i)
                t.test.push_back(t.dataset[t.result.test_rows[i]]);
            return t;
        }

        void write_history(Output &out, const std::string &name, const nn::TrainHistory &h)
        {
            auto csv = out.csv(name, {"epoch", "train_loss", "val_loss"});
            for (std::size_t e = 0; e < h.train_loss.size(); ++e)
                csv.row({static_cast<long long>(e + 1), h.train_loss[e],
                         e < h.val_loss.size() ? h.val_loss[e] : std::numeric_limits<double>::quiet_NaN()});
            csv.close();
        }

        double noise_var_at(double snr_db, double total_power) { return total_power / db_to_linear(snr_db); }

        double design_rate(const CMatrix &H, const CMatrix &X, const CMatrix &D, double noise_var)
        {
            const RVector s = metrics::per_user_sinr(H, X, D, noise_var);
            return metrics::sum_rate(std::span<const double>(s.data(), static_cast<std::size_t>(s.size())));
        }

        void run_case1_rate(const ExperimentConfig &cfg, Output &out)
        {
            const auto ref = cfg.text("reference") == "omni" ? wavenet::ReferenceKind::omni
                                                            : wavenet::ReferenceKind::directional;
            const wavenet::WaveformGenerator gen(scenario_of(cfg, static_cast<int>(cfg.integer("num_users")), ref));
            const double eta = cfg.real("eta");
            const double P = cfg.real("total_power");
            const int tau = static_cast<int>(cfg.integer("frame_length"));
            auto net = train_net(cfg, gen, eta, s_dataset, s_train, cfg.text("dataset_cache"));
            write_history(out, "training_loss.csv", net.result.history);
            net.result.model.save((out.dir / "waveform_net.bin").string());
            out.record->files.push_back("waveform_net.bin");

            const auto learned = wavenet::predict_waveforms(net.result.model, net.test, P);
            std::vector<CMatrix> exact(net.test.size());
            parallel_for(net.test.size(), cfg.threads, [&](std::size_t i)
                         { exact[i] = design::tradeoff_design(net.test[i].H, net.test[i].D, net.test[i].X0, eta, P, tau).X; });

            struct Method
            {
                std::string name;
                std::function<double(std::size_t, double)> rate;
            };
            const std::vector<Method> methods{
                {"learned", [&](std::size_t i, double nv) { return design_rate(net.test[i].H, learned[i].X, net.test[i].D, nv); }},
                {"tradeoff", [&](std::size_t i, double nv) { return design_rate(net.test[i].H, exact[i], net.test[i].D, nv); }},
                {"reference", [&](std::size_t i, double nv) { return design_rate(net.test[i].H, net.test[i].X0, net.test[i].D, nv); }},
                {"genie", [&](std::size_t i, double nv) { return design::genie_rate(net.test[i].D, nv).sum_rate; }},
            };

            auto csv = out.csv("rate.csv", {"snr_db", "method", "sum_rate_bits"});
            json &summary = out.record->summary;
            auto snrs = cfg.reals("snr_db");
            const double gap_db = cfg.real("gap_snr_db");
            if (std::find(snrs.begin(), snrs.end(), gap_db) == snrs.end())
                snrs.push_back(gap_db);
            for (double db : snrs)
            {
                const double nv = noise_var_at(db, P);
                for (const auto &m : methods)
                {
                    std::vector<double> r(net.test.size());
                    for (std::size_t i = 0; i < r.size(); ++i)
                        r[i] = m.rate(i, nv);
                    const double avg = mean(r);
                    csv.row({db, m.name, avg});
                    summary["sum_rate_bits." + m.name + "@" + tag(db)] = avg;
                }
            }
            csv.close();

            const double lr = summary["sum_rate_bits.learned@" + tag(gap_db)].get<double>();
            const double tr = summary["sum_rate_bits.tradeoff@" + tag(gap_db)].get<double>();
            summary["gap_snr_db"] = gap_db;
            summary["relative_gap"] = (tr - lr) / tr;
            summary["test_channels"] = net.test.size();
            summary["epochs_run"] = net.result.history.train_loss.size();
            summary["initial_train_loss"] = net.result.history.train_loss.front();
            summary["final_train_loss"] = net.result.history.train_loss.back();

            std::vector<double> mui(learned.size()), mis(learned.size());
            for (std::size_t i = 0; i < learned.size(); ++i)
            {
                const auto t = design::tradeoff_terms(net.test[i].H, net.test[i].D, net.test[i].X0, learned[i].X);
                mui[i] = t.mui;
                mis[i] = t.mismatch;
            }
            summary["learned_mean_mui"] = mean(mui);
            summary["learned_mean_mismatch"] = mean(mis);
        }

        std::vector<double> degrees_to_radians(const std::vector<double> &deg)
        {
            std::vector<double> r(deg.size());
            std::transform(deg.begin(), deg.end(), r.begin(), [](double d) { return d * pi / 180.0; });
            return r;
        }

        void run_case1_roc(const ExperimentConfig &cfg, Output &out)
        {
            const int M = static_cast<int>(cfg.integer("num_antennas"));
            const int K = static_cast<int>(cfg.integer("num_users"));
            const int tau = static_cast<int>(cfg.integer("frame_length"));
            const double P = cfg.real("total_power");
            const double theta = cfg.real("target_angle_deg") * pi / 180.0;
            const double noise_var = 1.0 / cfg.real("echo_snr");
            const auto trials = static_cast<std::size_t>(cfg.integer("trials"));
            const auto pool = static_cast<std::size_t>(cfg.integer("waveform_pool"));
            const double pfa = cfg.real("pfa");
            const auto ref = cfg.text("reference") == "omni" ? wavenet::ReferenceKind::omni
                                                            : wavenet::ReferenceKind::directional;

            struct Curve
            {
                std::string name;
                int antennas;
                double eta;
            };
            std::vector<Curve> curves;
            for (double eta : cfg.reals("etas"))
                curves.push_back({"eta" + tag(eta) + "_M" + std::to_string(M), M, eta});
            const double deta = cfg.real("doubled_eta");
            const std::string base_name = "eta" + tag(deta) + "_M" + std::to_string(M);
            if (std::none_of(curves.begin(), curves.end(), [&](const Curve &c) { return c.name == base_name; }))
                curves.push_back({base_name, M, deta});
            curves.push_back({"eta" + tag(deta) + "_M" + std::to_string(2 * M), 2 * M, deta});

            auto csv = out.csv("roc.csv", {"threshold", "pfa", "pd", "method"});
            json &summary = out.record->summary;
            const Rng master(cfg.seed);
            for (std::size_t c = 0; c < curves.size(); ++c)
            {
                const auto &curve = curves[c];
                auto sc = scenario_of(cfg, K, ref);
                sc.num_antennas = curve.antennas;
                if (tau < curve.antennas)
                    fail("frame_length must be at least twice num_antennas for the doubled array");
                const wavenet::WaveformGenerator gen(sc);
                const channel::ArrayGeometry geom{curve.antennas, 0.5};

                // Same channel stream for every curve at a given array size.
                std::vector<CMatrix> waveforms(pool);
                const Rng pool_rng(Rng::split_seed(cfg.seed, s_dataset + static_cast<std::uint64_t>(curve.antennas) * 1000));
                parallel_for(pool, cfg.threads, [&](std::size_t i)
                             {
                                 Rng r = pool_rng.child(i);
                                 const auto s = gen.draw(r);
                                 waveforms[i] = design::tradeoff_design(s.H, s.D, s.X0, curve.eta, P, tau).X;
                             });

                std::vector<double> h0(trials), h1(trials);
                const Rng trial_rng = master.child(s_trials);
                parallel_for(trials, cfg.threads, [&](std::size_t t)
                             {
                                 Rng r = trial_rng.child(t);
                                 const CMatrix &X = waveforms[t % pool];
                                 const cdouble alpha = std::polar(1.0, r.uniform(-pi, pi));
                                 const CMatrix z0 = metrics::simulate_echo(X, theta, alpha, noise_var, false, geom, r);
                                 const CMatrix z1 = metrics::simulate_echo(X, theta, alpha, noise_var, true, geom, r);
                                 h0[t] = metrics::glrt_statistic(z0, theta, X, noise_var, geom);
                                 h1[t] = metrics::glrt_statistic(z1, theta, X, noise_var, geom);
                             });
                const auto roc = metrics::roc_curve(h0, h1, static_cast<int>(cfg.integer("thresholds")));
                for (std::size_t i = 0; i < roc.thresholds.size(); ++i)
                    csv.row({roc.thresholds[i], roc.pfa[i], roc.pd[i], curve.name});
                summary["pd_at_pfa." + curve.name] = metrics::pd_at_pfa(h0, h1, pfa);
            }
            csv.close();
            summary["pfa"] = pfa;
        }

        struct PeakReport
        {
            std::vector<double> peaks_deg; // three strongest, ascending angle
            double max_error_deg = 180.0;
        };

        PeakReport peak_report(const metrics::BeampatternCurve &bp, std::vector<double> targets_deg)
        {
            PeakReport r;
            const auto idx = metrics::local_maxima(bp.gains);
            for (std::size_t i = 0; i < idx.size() && i < targets_deg.size(); ++i)
                r.peaks_deg.push_back(bp.angles[idx[i]] * 180.0 / pi);
            std::sort(r.peaks_deg.begin(), r.peaks_deg.end());
            std::sort(targets_deg.begin(), targets_deg.end());
            if (r.peaks_deg.size() == targets_deg.size())
            {
                r.max_error_deg = 0.0;
                for (std::size_t i = 0; i < targets_deg.size(); ++i)
                    r.max_error_deg = std::max(r.max_error_deg, std::abs(r.peaks_deg[i] - targets_deg[i]));
            }
            return r;
        }

        void run_case1_beampattern(const ExperimentConfig &cfg, Output &out)
        {
            const int M = static_cast<int>(cfg.integer("num_antennas"));
            const double P = cfg.real("total_power");
            const double eta = cfg.real("eta");
            const int tau = static_cast<int>(cfg.integer("frame_length"));
            const auto targets_deg = cfg.reals("targets_deg");
            auto sc = scenario_of(cfg, static_cast<int>(cfg.integer("num_users")), wavenet::ReferenceKind::directional);
            sc.target_angles = degrees_to_radians(targets_deg);
            sc.directional.mask_width_deg = cfg.real("mask_width_deg");
            sc.directional.grid_step_deg = cfg.real("grid_step_deg");
            const wavenet::WaveformGenerator gen(sc);
            const channel::ArrayGeometry geom{M, 0.5};
            const auto grid = metrics::angle_grid_deg(-90.0, 90.0, cfg.real("plot_step_deg"));

            auto net = train_net(cfg, gen, eta, s_dataset, s_train, cfg.text("dataset_cache"));
            write_history(out, "training_loss.csv", net.result.history);
            const auto learned = wavenet::predict_waveforms(net.result.model, net.test, P);
            CMatrix learned_cov = CMatrix::Zero(M, M), exact_cov = CMatrix::Zero(M, M);
            for (std::size_t i = 0; i < learned.size(); ++i)
            {
                learned_cov += metrics::waveform_covariance(learned[i].X);
                exact_cov += metrics::waveform_covariance(
                    design::tradeoff_design(net.test[i].H, net.test[i].D, net.test[i].X0, eta, P, tau).X);
            }
            learned_cov /= static_cast<double>(learned.size());
            exact_cov /= static_cast<double>(learned.size());

            const std::vector<std::pair<std::string, CMatrix>> methods{
                {"directional", gen.reference().matrix},
                {"omni", design::reference_covariance_omni(P, M).matrix},
                {"tradeoff_directional", exact_cov},
                {"learned_directional", learned_cov},
            };
            auto csv = out.csv("beampattern.csv", {"angle_rad", "method", "gain"});
            json &summary = out.record->summary;
            for (const auto &[name, cov] : methods)
            {
                const auto bp = metrics::transmit_beampattern(cov, grid, geom);
                for (std::size_t i = 0; i < grid.size(); ++i)
                    csv.row({grid[i], name, bp.gains[i]});
                if (name == "omni")
                    continue;
                const auto rep = peak_report(bp, targets_deg);
                summary["peaks_deg." + name] = rep.peaks_deg;
                summary["max_peak_error_deg." + name] = rep.max_error_deg;
            }
            csv.close();
            summary["epochs_run"] = net.result.history.train_loss.size();
        }

        void run_case1_aging(const ExperimentConfig &cfg, Output &out)
        {
            const int K = static_cast<int>(cfg.integer("num_users"));
            const int K_big = static_cast<int>(cfg.integer("mismatch_users"));
            const double P = cfg.real("total_power");
            const double eta = cfg.real("eta");
            const wavenet::WaveformGenerator gen(scenario_of(cfg, K, wavenet::ReferenceKind::omni));
            const wavenet::WaveformGenerator gen_big(scenario_of(cfg, K_big, wavenet::ReferenceKind::omni));
            const channel::ArrayGeometry geom{static_cast<int>(cfg.integer("num_antennas")), 0.5};
            channel::AgingParams aging;
            aging.user_speed = cfg.real("user_speed");
            aging.carrier_freq = cfg.real("carrier_freq");
            aging.sample_period = cfg.real("sample_period");

            const std::string cache = cfg.text("dataset_cache");
            auto net = train_net(cfg, gen, eta, s_dataset, s_train, cache);
            auto net_big = train_net(cfg, gen_big, eta, s_dataset_alt, s_train_alt, cache.empty() ? "" : cache + ".mismatch");
            write_history(out, "training_loss.csv", net.result.history);
            write_history(out, "training_loss_mismatch.csv", net_big.result.history);

            // Aging: the network sees the previous channel, the link uses the current one.
            const std::size_t n = net.test.size();
            std::vector<wavenet::WaveformSample> outdated(n), current(n);
            const Rng aging_rng(Rng::split_seed(cfg.seed, s_test));
            for (std::size_t i = 0; i < n; ++i)
            {
                Rng r = aging_rng.child(i);
                const auto users = gen.draw_users(r);
                const auto prev = channel::sample_channel_matrix(users, geom, r);
                CMatrix now(prev.entries.rows(), prev.entries.cols());
                for (int k = 0; k < K; ++k)
                    now.row(k) = channel::age_channel(prev.entries.row(k).transpose(), users[static_cast<std::size_t>(k)],
                                                      aging, r, geom)
                                     .transpose();
                outdated[i] = gen.complete(prev.entries, r);
                current[i] = gen.with_symbols(now, outdated[i].D);
            }
            const auto x_outdated = wavenet::predict_waveforms(net.result.model, outdated, P);
            const auto x_current = wavenet::predict_waveforms(net.result.model, current, P);

            // Topology: a K-user model driven by the first K users of a larger system.
            std::vector<wavenet::WaveformSample> truncated(net_big.test.size());
            for (std::size_t i = 0; i < truncated.size(); ++i)
                truncated[i] = gen.with_symbols(net_big.test[i].H.topRows(K), net_big.test[i].D.topRows(K));
            const auto x_small = wavenet::predict_waveforms(net.result.model, truncated, P);
            const auto x_big = wavenet::predict_waveforms(net_big.result.model, net_big.test, P);

            auto csv = out.csv("rate.csv", {"snr_db", "method", "sum_rate_bits"});
            json &summary = out.record->summary;
            auto snrs = cfg.reals("snr_db");
            const double eval_db = cfg.real("eval_snr_db");
            if (std::find(snrs.begin(), snrs.end(), eval_db) == snrs.end())
                snrs.push_back(eval_db);
            for (double db : snrs)
            {
                const double nv = noise_var_at(db, P);
                std::vector<double> matched(n), aged(n), big(x_big.size()), mism(x_big.size());
                for (std::size_t i = 0; i < n; ++i)
                {
                    matched[i] = design_rate(current[i].H, x_current[i].X, current[i].D, nv);
                    aged[i] = design_rate(current[i].H, x_outdated[i].X, current[i].D, nv);
                }
                for (std::size_t i = 0; i < x_big.size(); ++i)
                {
                    big[i] = design_rate(net_big.test[i].H, x_big[i].X, net_big.test[i].D, nv);
                    mism[i] = design_rate(net_big.test[i].H, x_small[i].X, net_big.test[i].D, nv);
                }
                const std::vector<std::pair<std::string, double>> rows{
                    {"matched", mean(matched)},
                    {"aged", mean(aged)},
                    {"matched_k" + std::to_string(K_big), mean(big)},
                    {"trained_k" + std::to_string(K) + "_in_k" + std::to_string(K_big), mean(mism)},
                };
                for (const auto &[name, v] : rows)
                    csv.row({db, name, v});
                if (db == eval_db)
                {
                    summary["rate_matched"] = rows[0].second;
                    summary["rate_aged"] = rows[1].second;
                    summary["rate_topology_matched"] = rows[2].second;
                    summary["rate_topology_mismatched"] = rows[3].second;
                    summary["aging_degradation"] = 1.0 - rows[1].second / rows[0].second;
                    summary["topology_degradation"] = 1.0 - rows[3].second / rows[2].second;
                }
            }
            csv.close();
            summary["eval_snr_db"] = eval_db;
            summary["jakes_correlation"] = channel::jakes_correlation(aging);
        }

        // ---------------------------------------------------------------- Case II

        struct PgaSetup
        {
            std::vector<hybrid::PgaProblem> train, validation, test;
            hybrid::StepTrainOptions options;
            double noise_var = 1.0;
            double fixed_step = 0.05;
        };

        PgaSetup pga_setup(const ExperimentConfig &cfg, double snr_db)
        {
            PgaSetup s;
            const int N = static_cast<int>(cfg.integer("num_antennas"));
            const int L = static_cast<int>(cfg.integer("num_rf"));
            const int K = static_cast<int>(cfg.integer("num_users"));
            s.noise_var = cfg.real("noise_var");
            const double P = s.noise_var * db_to_linear(snr_db);
            auto problems = [&](const char *key, Stream stream)
            {
                return hybrid::rayleigh_problems(static_cast<std::size_t>(cfg.integer(key)), N, L, K, P,
                                                 Rng::split_seed(cfg.seed, stream));
            };
            s.train = problems("train_channels", s_dataset);
            s.validation = problems("validation_channels", s_validation);
            s.test = problems("test_channels", s_test);
            auto &o = s.options;
            o.layers = static_cast<int>(cfg.integer("layers"));
            o.lr = cfg.real("lr");
            o.epochs = static_cast<int>(cfg.integer("epochs"));
            o.batch_size = static_cast<int>(cfg.integer("batch_size"));
            o.init_step = cfg.real("init_step");
            o.fd_epsilon = cfg.real("fd_epsilon");
            o.max_grad_norm = cfg.real("max_grad_norm");
            const auto w = cfg.text("weighting");
            o.weighting = w == "log2" ? hybrid::LayerWeighting::log2
                                      : (w == "uniform" ? hybrid::LayerWeighting::uniform : hybrid::LayerWeighting::log_natural);
            o.seed = Rng::split_seed(cfg.seed, s_train);
            o.threads = cfg.threads;
            s.fixed_step = cfg.real("fixed_step");
            return s;
        }

        // Per-channel rate traces; entry 0 is the initialization.
        std::vector<std::vector<double>> traces(const std::vector<hybrid::PgaProblem> &problems,
                                                const hybrid::StepSchedule &schedule, double noise_var, int threads)
        {
            std::vector<std::vector<double>> out(problems.size());
            parallel_for(problems.size(), threads, [&](std::size_t i)
                         {
                             const auto &p = problems[i];
                             out[i].push_back(metrics::hybrid_sum_rate(p.channels, p.init.F, p.init.W, noise_var).nats);
                             const auto t = hybrid::pga_run(p.channels, p.init, schedule, noise_var);
                             out[i].insert(out[i].end(), t.rates.begin(), t.rates.end());
                         });
            return out;
        }

        std::vector<double> layer_means(const std::vector<std::vector<double>> &t)
        {
            std::vector<double> m(t.front().size(), 0.0);
            for (const auto &row : t)
                for (std::size_t i = 0; i < m.size(); ++i)
                    m[i] += row[i] / static_cast<double>(t.size());
            return m;
        }

        void write_schedule(Output &out, const std::string &name, const hybrid::StepSchedule &s)
        {
            auto csv = out.csv(name, {"layer", "mu_f", "mu_w"});
            for (int i = 0; i < s.layers(); ++i)
                csv.row({static_cast<long long>(i + 1), s.steps(i, 0), s.steps(i, 1)});
            csv.close();
        }

        void run_case2_convergence(const ExperimentConfig &cfg, Output &out)
        {
            auto setup = pga_setup(cfg, cfg.real("snr_db"));
            const auto trained = hybrid::train_step_sizes(setup.train, setup.validation, setup.noise_var, setup.options);
            write_schedule(out, "schedule.csv", trained.schedule);
            {
                auto csv = out.csv("training_loss.csv", {"epoch", "train_loss", "val_loss"});
                for (std::size_t e = 0; e < trained.val_loss.size(); ++e)
                    csv.row({static_cast<long long>(e),
                             e == 0 ? std::numeric_limits<double>::quiet_NaN() : trained.train_loss[e - 1],
                             trained.val_loss[e]});
                csv.close();
            }

            const int I = setup.options.layers;
            const int horizon = std::max(I, static_cast<int>(cfg.integer("max_fixed_layers")));
            const auto fixed = hybrid::StepSchedule::constant(horizon, setup.fixed_step, setup.fixed_step);
            const auto t_fixed = traces(setup.test, fixed, setup.noise_var, cfg.threads);
            const auto t_unrolled = traces(setup.test, trained.schedule, setup.noise_var, cfg.threads);
            const auto m_fixed = layer_means(t_fixed);
            const auto m_unrolled = layer_means(t_unrolled);

            auto csv = out.csv("convergence.csv", {"layer", "method", "rate_nats"});
            for (std::size_t l = 0; l < m_fixed.size(); ++l)
                csv.row({static_cast<long long>(l), "pga", m_fixed[l]});
            for (std::size_t l = 0; l < m_unrolled.size(); ++l)
                csv.row({static_cast<long long>(l), "unrolled_pga", m_unrolled[l]});
            csv.close();

            std::size_t wins = 0;
            {
                auto per = out.csv("channel_rates.csv", {"channel", "method", "rate_nats"});
                for (std::size_t i = 0; i < setup.test.size(); ++i)
                {
                    const double u = t_unrolled[i][static_cast<std::size_t>(I)];
                    const double f = t_fixed[i][static_cast<std::size_t>(I)];
                    per.row({static_cast<long long>(i), "pga", f});
                    per.row({static_cast<long long>(i), "unrolled_pga", u});
                    wins += u >= f;
                }
                per.close();
            }

            const double tol = cfg.real("plateau_tolerance");
            const double final_rate = m_unrolled.back();
            int plateau = I;
            for (int l = 1; l <= I; ++l)
                if (m_unrolled[static_cast<std::size_t>(l)] >= (1.0 - tol) * final_rate)
                {
                    plateau = l;
                    break;
                }
            int reach = -1; // -1: not reached within the horizon
            for (int l = 1; l <= horizon; ++l)
                if (m_fixed[static_cast<std::size_t>(l)] >= (1.0 - tol) * final_rate)
                {
                    reach = l;
                    break;
                }

            json &summary = out.record->summary;
            summary["layers"] = I;
            summary["mean_rate_nats.unrolled_pga"] = final_rate;
            summary["mean_rate_nats.pga"] = m_fixed[static_cast<std::size_t>(I)];
            summary["mean_rate_nats.pga_at_horizon"] = m_fixed.back();
            summary["fraction_unrolled_ge_pga"] = static_cast<double>(wins) / static_cast<double>(setup.test.size());
            summary["unrolled_plateau_layer"] = plateau;
            summary["pga_layers_to_reach_unrolled"] = reach;
            summary["pga_horizon"] = horizon;
            summary["initial_val_loss"] = trained.val_loss.front();
            summary["best_val_loss"] = *std::min_element(trained.val_loss.begin(), trained.val_loss.end());
        }

        void run_case2_snr(const ExperimentConfig &cfg, Output &out)
        {
            auto csv = out.csv("rate.csv", {"snr_db", "method", "sum_rate_bits"});
            json &summary = out.record->summary;
            for (double db : cfg.reals("snr_db"))
            {
                auto setup = pga_setup(cfg, db);
                const auto trained = hybrid::train_step_sizes(setup.train, setup.validation, setup.noise_var, setup.options);
                const int I = setup.options.layers;
                const auto fixed = hybrid::StepSchedule::constant(I, setup.fixed_step, setup.fixed_step);
                const auto t_fixed = traces(setup.test, fixed, setup.noise_var, cfg.threads);
                const auto t_unrolled = traces(setup.test, trained.schedule, setup.noise_var, cfg.threads);
                std::vector<double> f, u;
                std::size_t wins = 0;
                for (std::size_t i = 0; i < setup.test.size(); ++i)
                {
                    f.push_back(t_fixed[i].back() / std::log(2.0));
                    u.push_back(t_unrolled[i].back() / std::log(2.0));
                    wins += u.back() >= f.back();
                }
                csv.row({db, "pga", mean(f)});
                csv.row({db, "unrolled_pga", mean(u)});
                summary["sum_rate_bits.pga@" + tag(db)] = mean(f);
                summary["sum_rate_bits.unrolled_pga@" + tag(db)] = mean(u);
                summary["fraction_unrolled_ge_pga@" + tag(db)] =
                    static_cast<double>(wins) / static_cast<double>(setup.test.size());
                write_schedule(out, "schedule_snr" + tag(db) + ".csv", trained.schedule);
            }
            csv.close();
        }

        // ---------------------------------------------------------------- Case III

        void write_constellation(Output &out, const std::string &name, const ae::Constellation &c)
        {
            auto csv = out.csv(name, {"label", "re", "im"});
            for (int i = 0; i < c.size(); ++i)
                csv.row({static_cast<long long>(c.labels[static_cast<std::size_t>(i)]), c.points(i).real(), c.points(i).imag()});
            csv.close();
        }

        void run_case3_sweep(const ExperimentConfig &cfg, Output &out)
        {
            const int bits = static_cast<int>(cfg.integer("bits"));
            const int M = 1 << bits;
            ae::Calibration cal;
            if (cfg.flag("calibrate"))
            {
                ae::CalibrationTarget target;
                target.ser = std::pow(10.0, cfg.real("target_log10_ser"));
                target.pd = cfg.real("target_pd");
                target.pfa = cfg.real("target_pfa");
                target.size = M;
                target.trials = static_cast<std::size_t>(cfg.integer("calibration_trials"));
                target.seed = Rng::split_seed(cfg.seed, s_calibration);
                cal = ae::calibrate_psk(target);
            }
            else
            {
                cal.comm_noise_var = cfg.real("comm_noise_var");
                cal.radar_noise_var = cfg.real("radar_noise_var");
                cal.posterior_threshold = cfg.real("posterior_threshold");
            }
            json &summary = out.record->summary;
            summary["calibration"] = {{"comm_noise_var", cal.comm_noise_var},
                                      {"radar_noise_var", cal.radar_noise_var},
                                      {"posterior_threshold", cal.posterior_threshold},
                                      {"energy_threshold", cal.energy_threshold}};

            const auto trials = static_cast<std::size_t>(cfg.integer("trials"));
            const Rng master(Rng::split_seed(cfg.seed, s_trials));
            std::uint64_t eval_index = 0;
            auto evaluate = [&](const ae::Constellation &c)
            {
                Rng r = master.child(eval_index++);
                return ae::evaluate_constellation(c, cal.comm_noise_var, cal.radar_noise_var, cal.posterior_threshold,
                                                  trials, r);
            };

            auto csv = out.csv("metrics.csv", {"method", "ser", "pd", "pfa"});
            for (auto [kind, name] : {std::pair{ae::BaselineKind::qam, "qam"}, std::pair{ae::BaselineKind::psk, "psk"}})
            {
                const auto c = ae::baseline_constellation(kind, M);
                const auto m = evaluate(c);
                const std::string label = name + std::to_string(M);
                csv.row({label, m.ser, m.pd, m.pfa});
                summary["metrics." + label] = {{"ser", m.ser}, {"pd", m.pd}, {"pfa", m.pfa}};
                write_constellation(out, "constellation_" + label + ".csv", c);
            }

            const int runs = static_cast<int>(cfg.integer("runs"));
            std::vector<std::vector<std::string>> per_run_rows;
            for (double eta : cfg.reals("etas"))
            {
                std::vector<double> ser, pd, pfa, spread, dmin;
                for (int run = 0; run < runs; ++run)
                {
                    ae::AeConfig ac;
                    ac.bits = bits;
                    ac.eta = eta;
                    ac.comm_noise_var = cal.comm_noise_var;
                    ac.radar_noise_var = cal.radar_noise_var;
                    ac.head = cfg.text("head") == "softmax" ? ae::CommHead::softmax : ae::CommHead::per_bit_sigmoid;
                    ac.epochs = static_cast<int>(cfg.integer("epochs"));
                    ac.samples_per_epoch = static_cast<int>(cfg.integer("samples_per_epoch"));
                    ac.batch_size = static_cast<int>(cfg.integer("batch_size"));
                    ac.lr = cfg.real("lr");
                    ac.seed = Rng::split_seed(Rng::split_seed(cfg.seed, s_train), static_cast<std::uint64_t>(run));
                    const auto model = ae::train_isac_ae(ac);
                    const auto c = ae::extract_constellation(model);
                    const auto m = evaluate(c);
                    ser.push_back(m.ser);
                    pd.push_back(m.pd);
                    pfa.push_back(m.pfa);
                    spread.push_back(c.amplitude_spread());
                    dmin.push_back(c.min_distance());
                    write_constellation(out, "constellation_ae_eta" + tag(eta) + "_run" + std::to_string(run) + ".csv", c);
                    per_run_rows.push_back({"ae_eta" + tag(eta) + "_run" + std::to_string(run), io::format_number(m.ser),
                                            io::format_number(m.pd), io::format_number(m.pfa)});
                }
                const std::string label = "ae_eta" + tag(eta);
                csv.row({label, mean(ser), mean(pd), mean(pfa)});
                summary["metrics." + label] = {{"ser", mean(ser)},
                                               {"pd", mean(pd)},
                                               {"pfa", mean(pfa)},
                                               {"amplitude_spread", mean(spread)},
                                               {"amplitude_spread_runs", spread},
                                               {"min_distance", *std::min_element(dmin.begin(), dmin.end())},
                                               {"ser_runs", ser},
                                               {"pd_runs", pd}};
            }
            for (const auto &r : per_run_rows)
                csv.row({r[0], r[1], r[2], r[3]});
            csv.close();
        }
    }

    const char *toolkit_version() { return ISAC_VERSION_STRING; }

    json RunRecord::to_json() const
    {
        return json{{"toolkit_version", version}, {"config", config},         {"wall_time_s", wall_time_s},
                    {"files", files},             {"summary", summary},       {"warnings", warnings}};
    }

    RunRecord run(const ExperimentConfig &cfg)
    {
        const auto start = std::chrono::steady_clock::now();
        RunRecord record;
        record.config = cfg.to_json();
        record.version = toolkit_version();

        const fs::path dir(cfg.output_dir);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec)
            throw Error(ErrorKind::io, "cannot create output directory " + dir.string() + ": " + ec.message());
        fs::remove(dir / record_file, ec);

        const int previous = default_threads();
        set_default_threads(cfg.threads);
        struct Restore
        {
            int n;
            ~Restore() { set_default_threads(n); }
        } restore{previous};

        Output out{dir, &record};
        switch (cfg.experiment)
        {
        case config::Experiment::mi_mmse: run_mi_mmse(cfg, out); break;
        case config::Experiment::case1_rate: run_case1_rate(cfg, out); break;
        case config::Experiment::case1_roc: run_case1_roc(cfg, out); break;
        case config::Experiment::case1_beampattern: run_case1_beampattern(cfg, out); break;
        case config::Experiment::case1_aging: run_case1_aging(cfg, out); break;
        case config::Experiment::case2_convergence: run_case2_convergence(cfg, out); break;
        case config::Experiment::case2_snr: run_case2_snr(cfg, out); break;
        case config::Experiment::case3_sweep: run_case3_sweep(cfg, out); break;
        }

        record.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const fs::path tmp = dir / (std::string(record_file) + ".tmp");
        {
            std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
            if (!f)
                throw Error(ErrorKind::io, "cannot write " + tmp.string());
            f << record.to_json().dump(2) << '\n';
            if (!f)
                throw Error(ErrorKind::io, "failed writing " + tmp.string());
        }
        fs::rename(tmp, dir / record_file, ec);
        if (ec)
            throw Error(ErrorKind::io, "cannot finalize run record: " + ec.message());
        return record;
    }
}
