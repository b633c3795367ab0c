#include "tripweaver/cli_app.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tripweaver/errors.hpp"
#include "tripweaver/ingest.hpp"
#include "tripweaver/json_io.hpp"
#include "tripweaver/rng.hpp"
#include "tripweaver/schedule.hpp"
#include "tripweaver/search.hpp"
#include "tripweaver/synth.hpp"

namespace tripweaver {

namespace {

namespace fs = std::filesystem;

struct PlannerConfig {
  double alpha = 0.5;
  double max_wait = 60.0;
  int candidate_limit = 1000;
  int local_search_rounds = 50;
  std::uint64_t seed = 42;
  int utc_offset_min = 0;
  double trim_low = 5.0;
  double trim_high = 95.0;
  double stay_dist_m = 200.0;
  double stay_min = 20.0;
  double snap_radius_m = 100.0;
  int top_k = 1000;
  double fallback_speed_kmh = 25.0;
  int observation_days = 30;
  double smoothing = 1.0;
};

PlannerConfig load_config(const fs::path& path) {
  PlannerConfig cfg;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("invalid config JSON: " + std::string(e.what()));
  }
  if (!doc.is_object()) {
    throw DomainError("config must be a JSON object");
  }
  for (const auto& [key, value] : doc.items()) {
    if (key == "alpha") {
      cfg.alpha = value.get<double>();
    } else if (key == "max_wait") {
      cfg.max_wait = value.get<double>();
    } else if (key == "candidate_limit") {
      cfg.candidate_limit = value.get<int>();
    } else if (key == "local_search_rounds") {
      cfg.local_search_rounds = value.get<int>();
    } else if (key == "seed") {
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "utc_offset_min") {
      cfg.utc_offset_min = value.get<int>();
    } else if (key == "trim_low") {
      cfg.trim_low = value.get<double>();
    } else if (key == "trim_high") {
      cfg.trim_high = value.get<double>();
    } else if (key == "stay_dist_m") {
      cfg.stay_dist_m = value.get<double>();
    } else if (key == "stay_min") {
      cfg.stay_min = value.get<double>();
    } else if (key == "snap_radius_m") {
      cfg.snap_radius_m = value.get<double>();
    } else if (key == "top_k") {
      cfg.top_k = value.get<int>();
    } else if (key == "fallback_speed_kmh") {
      cfg.fallback_speed_kmh = value.get<double>();
    } else if (key == "observation_days") {
      cfg.observation_days = value.get<int>();
    } else if (key == "smoothing") {
      cfg.smoothing = value.get<double>();
    } else {
      throw DomainError("unknown config key: " + key);
    }
  }
  return cfg;
}

// Minutes-of-day from "HH:MM".
int parse_hhmm(const std::string& text) {
  int hours = 0;
  int minutes = 0;
  char colon = 0;
  std::istringstream in(text);
  if (!(in >> hours >> colon >> minutes) || colon != ':' || !in.eof() || hours < 0 || hours > 24 ||
      minutes < 0 || minutes > 59) {
    throw DomainError("expected HH:MM, got '" + text + "'");
  }
  const int total = hours * 60 + minutes;
  if (total > kMinutesPerDay) {
    throw DomainError("time of day out of range: " + text);
  }
  return total;
}

LatLon parse_latlon(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw DomainError("expected LAT,LON, got '" + text + "'");
  }
  try {
    const LatLon p{std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
    if (!valid_coordinates(p)) {
      throw DomainError("coordinates out of range: " + text);
    }
    return p;
  } catch (const std::logic_error&) {
    throw DomainError("expected LAT,LON, got '" + text + "'");
  }
}

template <typename Record>
ParseResult<Record> parse_file(const fs::path& path,
                               ParseResult<Record> (*parser)(std::istream&)) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open input file: " + path.string());
  }
  return parser(in);
}

UserProfile uniform_profile(const PoiNetwork& network) {
  UserProfile user;
  user.user_id = "uniform";
  std::set<std::string> categories;
  for (const Venue& v : network.venues()) {
    categories.insert(v.category);
  }
  for (const std::string& c : categories) {
    user.category_weights[c] = 1.0 / static_cast<double>(categories.size());
  }
  return user;
}

UserProfile resolve_user(const PoiNetwork& network, const fs::path& network_path,
                         const std::string& users_path, const std::string& user_id) {
  if (user_id.empty()) {
    return uniform_profile(network);
  }
  fs::path path;
  if (!users_path.empty()) {
    path = users_path;
  } else {
    path = network_path.parent_path() / "users.json";
  }
  if (!fs::exists(path)) {
    throw IoError("users file not found: " + path.string());
  }
  const auto users = users_from_json(nlohmann::json::parse(read_text_file(path)));
  for (const UserProfile& u : users) {
    if (u.user_id == user_id) {
      return u;
    }
  }
  throw LookupError("unknown user id: " + user_id);
}

int cmd_gen_data(const PlannerConfig& cfg, const std::string& out_dir, int venues, int vehicles,
                 int users, int trips, int checkins, int days, double noise_m, int cadence_s) {
  CityParams city_params;
  const CityGroundTruth city = generate_city(cfg.seed, venues, city_params);

  TraceParams trace_params;
  trace_params.n_vehicles = vehicles;
  trace_params.trips_per_vehicle = trips;
  trace_params.noise_m = noise_m;
  trace_params.cadence_s = cadence_s;

  CheckinParams checkin_params;
  checkin_params.n_users = users;
  checkin_params.checkins_per_user = checkins;
  checkin_params.days = days;

  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create output directory: " + dir.string());
  }
  write_text_file(dir / "venues.csv", venues_csv(city));
  write_text_file(dir / "traces.csv", generate_traces(city, trace_params, Rng::mix(cfg.seed, 1)));
  write_text_file(dir / "checkins.csv",
                  generate_checkins(city, checkin_params, Rng::mix(cfg.seed, 2)));
  write_text_file(dir / "ground_truth.json", ground_truth_json(city));

  std::cout << "wrote venues.csv, traces.csv, checkins.csv, ground_truth.json to " << dir.string()
            << "\n";
  return 0;
}

int cmd_build_network(const PlannerConfig& cfg, const std::string& data_dir,
                      std::string venues_path, std::string checkins_path, std::string traces_path,
                      const std::string& out_path) {
  const fs::path dir(data_dir);
  if (venues_path.empty()) {
    venues_path = (dir / "venues.csv").string();
  }
  if (checkins_path.empty()) {
    checkins_path = (dir / "checkins.csv").string();
  }
  if (traces_path.empty()) {
    traces_path = (dir / "traces.csv").string();
  }

  const auto venues = parse_file<Venue>(venues_path, parse_venues);
  const auto checkins = parse_file<CheckinRecord>(checkins_path, parse_checkins);
  const auto traces = parse_file<GpsPoint>(traces_path, parse_traces);

  NetworkBuildParams params;
  params.top_k = cfg.top_k;
  params.observation_days = cfg.observation_days;
  params.smoothing = cfg.smoothing;
  params.transit.stay_dist_m = cfg.stay_dist_m;
  params.transit.stay_min = cfg.stay_min;
  params.transit.snap_radius_m = cfg.snap_radius_m;
  params.transit.trim_low = cfg.trim_low;
  params.transit.trim_high = cfg.trim_high;
  params.transit.utc_offset_min = cfg.utc_offset_min;
  params.transit.default_speed_kmh = cfg.fallback_speed_kmh;

  NetworkBuildOutput output =
      build_poi_network(venues.records, checkins.records, traces.records, params);

  const fs::path out(out_path);
  save_network(output.network, out);
  write_text_file(out.parent_path() / "users.json", users_to_json(output.users).dump(2) + "\n");

  const NetworkBuildSummary& s = output.summary;
  char line[256];
  std::snprintf(line, sizeof(line),
                "venues kept: %zu of %zu\ncheck-ins used: %zu (unknown venue: %zu, malformed: "
                "%zu)\nstay points: %zu\ntransit samples: %zu\nobserved cells: %zu\nfallback "
                "fraction: %.6f\n",
                s.venues_kept, s.venues_in, s.checkins_used, s.checkins_unknown_venue,
                checkins.skipped, s.stay_points, s.transit_samples, s.observed_cells,
                s.fallback_fraction);
  std::cout << line;
  std::cout << "wrote " << out.string() << " and "
            << (out.parent_path() / "users.json").string() << "\n";
  return 0;
}

int cmd_plan(const PlannerConfig& cfg, const std::string& network_path,
             const std::string& users_path, const std::string& user_id,
             const std::string& start_time, const std::string& end_time,
             const std::string& start_loc, const std::string& end_loc,
             const std::string& out_path, const std::string& geojson_path) {
  const PoiNetwork network = load_network(network_path);
  const UserProfile user = resolve_user(network, network_path, users_path, user_id);

  Query query;
  query.start_time = parse_hhmm(start_time);
  query.end_time = parse_hhmm(end_time);
  query.start_location = parse_latlon(start_loc);
  query.end_location = end_loc.empty() ? query.start_location : parse_latlon(end_loc);
  validate_query(query);

  ScheduleParams schedule_params{cfg.max_wait};
  SearchParams search_params;
  search_params.candidate_limit = cfg.candidate_limit;
  search_params.local_search_rounds = cfg.local_search_rounds;
  search_params.rng_seed = cfg.seed;
  ScoringParams scoring_params{cfg.alpha};

  const PlanResult result = plan(network, user, query, schedule_params, search_params,
                                 scoring_params);

  const std::string doc =
      itinerary_to_json(result, query, user, network, scoring_params).dump(2) + "\n";
  std::cout << doc;
  if (!out_path.empty()) {
    write_text_file(out_path, doc);
  }
  if (!geojson_path.empty()) {
    write_text_file(geojson_path, itinerary_to_geojson(result, query, network).dump(2) + "\n");
  }
  return 0;
}

int cmd_eval(const PlannerConfig& cfg, const std::string& network_path, int instances,
             int candidates, const std::string& out_path) {
  if (candidates < 1 || candidates > 10) {
    throw DomainError("eval requires 1 <= candidates <= 10");
  }
  const PoiNetwork network = load_network(network_path);
  if (network.venues().size() < static_cast<std::size_t>(candidates)) {
    throw DomainError("network too small for requested candidate count");
  }

  ScheduleParams schedule_params{cfg.max_wait};
  SearchParams search_params;
  search_params.candidate_limit = cfg.candidate_limit;
  search_params.local_search_rounds = cfg.local_search_rounds;
  ScoringParams scoring_params{cfg.alpha};

  auto report_instances = nlohmann::ordered_json::array();
  double ratio_sum = 0.0;
  double ratio_min = 1.0;
  std::size_t violations = 0;
  double plan_ms_total = 0.0;
  double brute_ms_total = 0.0;

  for (int i = 0; i < instances; ++i) {
    Rng rng(Rng::mix(cfg.seed, 3000017ULL + static_cast<std::uint64_t>(i)));

    // Distinct candidate venues, seeded per instance.
    std::set<std::size_t> picked;
    while (picked.size() < static_cast<std::size_t>(candidates)) {
      picked.insert(static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<int>(network.venues().size()) - 1)));
    }
    std::vector<std::string> ids;
    for (std::size_t idx : picked) {
      ids.push_back(network.venues()[idx].id);
    }
    const PoiNetwork sub = network.restricted_to(ids);

    Query query;
    const Venue& anchor =
        sub.venues()[static_cast<std::size_t>(rng.uniform_int(0, candidates - 1))];
    query.start_location = anchor.location;
    query.end_location = anchor.location;
    query.start_time = 15 * rng.uniform_int(28, 44);  // 07:00 .. 11:00
    const double budget = 15 * rng.uniform_int(16, 32);  // 4h .. 8h
    query.end_time = std::min(query.start_time + budget, 1380.0);

    // Seeded single-peak preference: the liked category gets weight 0.6, the
    // rest share the remainder.
    UserProfile user;
    user.user_id = "eval";
    std::set<std::string> categories;
    for (const Venue& v : sub.venues()) {
      categories.insert(v.category);
    }
    const Venue& liked =
        sub.venues()[static_cast<std::size_t>(rng.uniform_int(0, candidates - 1))];
    if (categories.size() == 1) {
      user.category_weights[liked.category] = 1.0;
    } else {
      const double rest = 0.4 / static_cast<double>(categories.size() - 1);
      for (const std::string& c : categories) {
        user.category_weights[c] = c == liked.category ? 0.6 : rest;
      }
    }

    const auto plan_start = std::chrono::steady_clock::now();
    const PlanResult planned = plan(sub, user, query, schedule_params, search_params,
                                    scoring_params);
    const auto plan_end = std::chrono::steady_clock::now();
    const Itinerary best =
        brute_force(sub, user, query, ids, schedule_params, scoring_params);
    const auto brute_end = std::chrono::steady_clock::now();

    const double plan_ms =
        std::chrono::duration<double, std::milli>(plan_end - plan_start).count();
    const double brute_ms =
        std::chrono::duration<double, std::milli>(brute_end - plan_end).count();
    plan_ms_total += plan_ms;
    brute_ms_total += brute_ms;

    // Independent feasibility re-check of the planner's order.
    bool feasible = planned.feasible;
    if (feasible) {
      std::vector<std::string> order;
      for (const ScheduledVisit& v : planned.itinerary.visits) {
        order.push_back(v.venue_id);
      }
      feasible = simulate(sub, query, order, schedule_params).feasible;
    }
    if (!feasible) {
      ++violations;
    }

    const double brute_score = best.score;
    const double plan_score = planned.itinerary.score;
    const double ratio = brute_score > 0.0 ? plan_score / brute_score : 1.0;
    ratio_sum += ratio;
    ratio_min = std::min(ratio_min, ratio);

    report_instances.push_back({{"instance", i},
                                {"candidates", ids},
                                {"start_time", query.start_time},
                                {"end_time", query.end_time},
                                {"plan_score", plan_score},
                                {"plan_venues", planned.itinerary.visits.size()},
                                {"brute_score", brute_score},
                                {"brute_venues", best.visits.size()},
                                {"ratio", ratio},
                                {"feasible", feasible},
                                {"plan_ms", plan_ms},
                                {"brute_ms", brute_ms}});
  }

  nlohmann::ordered_json report;
  report["params"] = {{"instances", instances},
                      {"candidates", candidates},
                      {"seed", cfg.seed},
                      {"alpha", cfg.alpha},
                      {"max_wait", cfg.max_wait}};
  report["instances"] = std::move(report_instances);
  report["aggregate"] = {{"instances", instances},
                         {"feasibility_violations", violations},
                         {"mean_ratio", instances > 0 ? ratio_sum / instances : 1.0},
                         {"min_ratio", instances > 0 ? ratio_min : 1.0},
                         {"plan_ms_total", plan_ms_total},
                         {"brute_ms_total", brute_ms_total}};

  const std::string doc = report.dump(2) + "\n";
  std::cout << doc;
  if (!out_path.empty()) {
    write_text_file(out_path, doc);
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  // The config file provides defaults; explicit flags win. Scan for --config
  // first so flag defaults can be seeded from it.
  PlannerConfig cfg;
  try {
    for (int i = 1; i < argc; ++i) {
      const std::string arg = argv[i];
      if (arg == "--config" && i + 1 < argc) {
        cfg = load_config(argv[i + 1]);
        break;
      }
      if (arg.rfind("--config=", 0) == 0) {
        cfg = load_config(arg.substr(9));
        break;
      }
    }

    CLI::App app{"tripweaver: POI-network trip planning over crowdsourced data"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file (flags override it)");

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "generate a synthetic city and crowd data");
    std::string gen_out;
    int gen_venues = 200;
    int gen_vehicles = 100;
    int gen_users = 500;
    int gen_trips = 20;
    int gen_checkins = 40;
    int gen_days = cfg.observation_days;
    double gen_noise = 10.0;
    int gen_cadence = 60;
    gen->add_option("--out", gen_out, "output directory")->required();
    gen->add_option("--seed", cfg.seed, "generator seed");
    gen->add_option("--venues", gen_venues, "venue count");
    gen->add_option("--vehicles", gen_vehicles, "vehicle count");
    gen->add_option("--users", gen_users, "user count");
    gen->add_option("--trips", gen_trips, "trips per vehicle");
    gen->add_option("--checkins", gen_checkins, "check-ins per user");
    gen->add_option("--days", gen_days, "observation days");
    gen->add_option("--noise-m", gen_noise, "GPS noise scale, meters");
    gen->add_option("--cadence-s", gen_cadence, "GPS point cadence, seconds");
    gen->add_option("--config", config_path, "JSON config file");

    // build-network
    auto* build = app.add_subcommand("build-network", "ingest CSVs into network.json");
    std::string build_data = ".";
    std::string build_venues;
    std::string build_checkins;
    std::string build_traces;
    std::string build_out = "network.json";
    build->add_option("--data", build_data, "directory with venues/checkins/traces CSVs");
    build->add_option("--venues-csv", build_venues, "venues.csv path override");
    build->add_option("--checkins-csv", build_checkins, "checkins.csv path override");
    build->add_option("--traces-csv", build_traces, "traces.csv path override");
    build->add_option("--out", build_out, "output network.json path");
    build->add_option("--top-k", cfg.top_k, "keep the K most checked-in venues");
    build->add_option("--days", cfg.observation_days, "observation days for popularity");
    build->add_option("--smoothing", cfg.smoothing, "user-profile Laplace smoothing");
    build->add_option("--utc-offset-min", cfg.utc_offset_min, "local-time offset, minutes");
    build->add_option("--stay-dist-m", cfg.stay_dist_m, "stay-point distance threshold");
    build->add_option("--stay-min", cfg.stay_min, "stay-point time threshold, minutes");
    build->add_option("--snap-radius-m", cfg.snap_radius_m, "stay-point to venue snap radius");
    build->add_option("--trim-low", cfg.trim_low, "lower trim percentile");
    build->add_option("--trim-high", cfg.trim_high, "upper trim percentile");
    build->add_option("--fallback-speed-kmh", cfg.fallback_speed_kmh,
                      "fallback speed for slots without samples");
    build->add_option("--config", config_path, "JSON config file");

    // plan
    auto* plan_cmd = app.add_subcommand("plan", "plan an itinerary against a network");
    std::string plan_network;
    std::string plan_users;
    std::string plan_user;
    std::string plan_start_time;
    std::string plan_end_time;
    std::string plan_start_loc;
    std::string plan_end_loc;
    std::string plan_out;
    std::string plan_geojson;
    plan_cmd->add_option("--network", plan_network, "network.json path")->required();
    plan_cmd->add_option("--users", plan_users, "users.json path (default: next to network)");
    plan_cmd->add_option("--user", plan_user, "user id (omit for a uniform profile)");
    plan_cmd->add_option("--start-time", plan_start_time, "HH:MM")->required();
    plan_cmd->add_option("--end-time", plan_end_time, "HH:MM")->required();
    plan_cmd->add_option("--start-loc", plan_start_loc, "LAT,LON")->required();
    plan_cmd->add_option("--end-loc", plan_end_loc, "LAT,LON (default: start location)");
    plan_cmd->add_option("--out", plan_out, "write itinerary JSON here as well");
    plan_cmd->add_option("--geojson", plan_geojson, "write a GeoJSON FeatureCollection here");
    plan_cmd->add_option("--alpha", cfg.alpha, "attractiveness blend in [0,1]");
    plan_cmd->add_option("--max-wait", cfg.max_wait, "max minutes to wait at a closed venue");
    plan_cmd->add_option("--candidate-limit", cfg.candidate_limit, "max candidate venues");
    plan_cmd->add_option("--local-search-rounds", cfg.local_search_rounds, "local search rounds");
    plan_cmd->add_option("--seed", cfg.seed, "reserved for randomized restarts");
    plan_cmd->add_option("--config", config_path, "JSON config file");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "compare plan against the brute-force oracle");
    std::string eval_network;
    int eval_instances = 100;
    int eval_candidates = 6;
    std::string eval_out;
    eval_cmd->add_option("--network", eval_network, "network.json path")->required();
    eval_cmd->add_option("--instances", eval_instances, "number of seeded instances");
    eval_cmd->add_option("--candidates", eval_candidates, "candidate venues per instance (<=10)");
    eval_cmd->add_option("--seed", cfg.seed, "instance seed");
    eval_cmd->add_option("--out", eval_out, "write the report here as well");
    eval_cmd->add_option("--alpha", cfg.alpha, "attractiveness blend in [0,1]");
    eval_cmd->add_option("--max-wait", cfg.max_wait, "max minutes to wait at a closed venue");
    eval_cmd->add_option("--local-search-rounds", cfg.local_search_rounds, "local search rounds");
    eval_cmd->add_option("--config", config_path, "JSON config file");

    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }

    if (gen->parsed()) {
      return cmd_gen_data(cfg, gen_out, gen_venues, gen_vehicles, gen_users, gen_trips,
                          gen_checkins, gen_days, gen_noise, gen_cadence);
    }
    if (build->parsed()) {
      return cmd_build_network(cfg, build_data, build_venues, build_checkins, build_traces,
                               build_out);
    }
    if (plan_cmd->parsed()) {
      return cmd_plan(cfg, plan_network, plan_users, plan_user, plan_start_time, plan_end_time,
                      plan_start_loc, plan_end_loc, plan_out, plan_geojson);
    }
    if (eval_cmd->parsed()) {
      return cmd_eval(cfg, eval_network, eval_instances, eval_candidates, eval_out);
    }
    return 2;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 1;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return 1;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const LookupError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("tripweaver");
  for (const std::string& a : args) {
    argv.push_back(a.c_str());
  }
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace tripweaver
