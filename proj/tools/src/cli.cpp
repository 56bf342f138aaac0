#include "lakelet/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "lakelet/analytics.hpp"
#include "lakelet/batch_import.hpp"
#include "lakelet/catalog.hpp"
#include "lakelet/csv.hpp"
#include "lakelet/fixtures.hpp"
#include "lakelet/flow.hpp"
#include "lakelet/json_codec.hpp"
#include "lakelet/lake_store.hpp"
#include "lakelet/report.hpp"
#include "lakelet/schema_read.hpp"
#include "lakelet/text_analytics.hpp"
#include "lakelet/time_util.hpp"

namespace lakelet::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* kLayoutDirs[] = {"zones", "manifests", "provenance", "checkpoints", "lexicons"};

enum class OutFormat { kAscii, kCsv, kJson };

OutFormat parse_format(const std::string& s) {
  if (s == "csv") return OutFormat::kCsv;
  if (s == "json") return OutFormat::kJson;
  return OutFormat::kAscii;
}

std::string cell_text(const ordered_json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

struct Grid {
  std::vector<std::string> header;
  std::vector<std::vector<ordered_json>> rows;
};

void render(const Grid& g, OutFormat fmt, std::ostream& out) {
  switch (fmt) {
    case OutFormat::kCsv: {
      out << csv::format_record(g.header);
      for (const auto& row : g.rows) {
        csv::Record rec;
        for (const auto& v : row) rec.push_back(cell_text(v));
        out << csv::format_record(rec);
      }
      return;
    }
    case OutFormat::kJson: {
      ordered_json arr = ordered_json::array();
      for (const auto& row : g.rows) {
        ordered_json obj = ordered_json::object();
        for (size_t i = 0; i < g.header.size(); ++i) obj[g.header[i]] = row[i];
        arr.push_back(std::move(obj));
      }
      out << arr.dump(2) << "\n";
      return;
    }
    case OutFormat::kAscii: {
      std::vector<size_t> width;
      for (const auto& h : g.header) width.push_back(h.size());
      for (const auto& row : g.rows) {
        for (size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], cell_text(row[i]).size());
      }
      auto line = [&](const std::vector<std::string>& cells) {
        std::string s;
        for (size_t i = 0; i < cells.size(); ++i) {
          if (i > 0) s += "  ";
          s += cells[i];
          if (i + 1 < cells.size()) s.append(width[i] - cells[i].size(), ' ');
        }
        out << s << "\n";
      };
      line(g.header);
      std::vector<std::string> rule;
      for (size_t w : width) rule.emplace_back(w, '-');
      line(rule);
      for (const auto& row : g.rows) {
        std::vector<std::string> cells;
        for (const auto& v : row) cells.push_back(cell_text(v));
        line(cells);
      }
      return;
    }
  }
}

using KeyValues = std::vector<std::pair<std::string, ordered_json>>;

void render_kv(const KeyValues& kv, OutFormat fmt, std::ostream& out) {
  if (fmt == OutFormat::kJson) {
    ordered_json obj = ordered_json::object();
    for (const auto& [k, v] : kv) obj[k] = v;
    out << obj.dump(2) << "\n";
    return;
  }
  Grid g{{"field", "value"}, {}};
  for (const auto& [k, v] : kv) g.rows.push_back({k, v});
  render(g, fmt, out);
}

fs::path resolve_root(const std::string& flag) {
  if (!flag.empty()) return fs::absolute(flag);
  if (const char* env = std::getenv("LAKE_ROOT"); env && *env) return fs::absolute(env);
  throw_error(ErrorCode::kInvalidArgument, "no lake given: pass --lake or set LAKE_ROOT");
}

BrandLexicon brand_lexicon(const fs::path& root, const std::string& override_path) {
  if (!override_path.empty()) return BrandLexicon::from_file(override_path);
  fs::path p = root / "lexicons" / "brands.txt";
  return fs::exists(p) ? BrandLexicon::from_file(p) : BrandLexicon::defaults();
}

SentimentLexicon sentiment_lexicon(const fs::path& root, const std::string& pos, const std::string& neg) {
  fs::path p = pos.empty() ? root / "lexicons" / "positive.txt" : fs::path(pos);
  fs::path n = neg.empty() ? root / "lexicons" / "negative.txt" : fs::path(neg);
  if (fs::exists(p) && fs::exists(n)) return SentimentLexicon::from_files(p, n);
  if (!pos.empty() || !neg.empty()) throw_error(ErrorCode::kIoError, "lexicon file not found");
  return SentimentLexicon::defaults();
}

ordered_json import_report_json(const ImportReport& r) {
  return ordered_json{{"dataset", r.dataset},
                      {"rows_imported", r.rows_imported},
                      {"splits_used", r.splits_used},
                      {"files_written", r.files_written},
                      {"rows_per_split", r.rows_per_split},
                      {"manifest_version", r.manifest_version},
                      {"no_op", r.no_op},
                      {"already_imported_warning", r.already_imported_warning},
                      {"non_numeric_split_fallbacks", r.non_numeric_split_fallbacks},
                      {"rows_skipped", r.rows_skipped},
                      {"source_hash", r.source_hash},
                      {"duration_ms", r.duration.count()}};
}

void warn_import(const ImportReport& r, std::ostream& err) {
  if (r.no_op) err << "warning: " << r.dataset << ": source table is empty, nothing committed\n";
  if (r.already_imported_warning) err << "warning: " << r.dataset << ": this source was already imported\n";
  if (r.non_numeric_split_fallbacks > 0) err << "warning: " << r.dataset << ": split column not integer, used 1 split\n";
  if (r.rows_skipped > 0) err << "warning: " << r.dataset << ": skipped " << r.rows_skipped << " malformed rows\n";
}

ordered_json flow_report_json(const FlowReport& r) {
  ordered_json depths = ordered_json::object();
  for (const auto& [k, v] : r.max_queue_depths) depths[k] = v;
  return ordered_json{{"run_id", r.run_id},
                      {"records_in", r.records_in},
                      {"records_out", r.records_out},
                      {"records_dropped", r.records_dropped},
                      {"files_committed", r.files_committed},
                      {"max_queue_depths", depths},
                      {"elapsed_ms", r.elapsed.count()}};
}

KeyValues as_kv(const ordered_json& obj) {
  KeyValues kv;
  for (const auto& [k, v] : obj.items()) {
    if (v.is_object()) {
      for (const auto& [k2, v2] : v.items()) kv.emplace_back(k + "." + k2, v2);
    } else if (v.is_array()) {
      kv.emplace_back(k, v.dump());
    } else {
      kv.emplace_back(k, v);
    }
  }
  return kv;
}

FlowGraphSpec demo_flow_spec() {
  return FlowGraphSpec::from_json(json::parse(R"({
    "name": "demo-tweets",
    "processors": [
      {"name": "tweets", "kind": "tweet_source", "params": {"label": "twitter-sim"}},
      {"name": "parse", "kind": "parse_tweet"},
      {"name": "raw", "kind": "micro_batch_sink",
       "params": {"dataset": "raw/tweets", "batch_max": 500, "flush_interval_ms": 1000}},
      {"name": "quarantine", "kind": "micro_batch_sink",
       "params": {"dataset": "landing/quarantine", "batch_max": 100}}
    ],
    "connections": [
      {"from": "tweets", "to": "parse", "capacity": 64},
      {"from": "parse", "to": "raw", "capacity": 64},
      {"from": "parse:quarantine", "to": "quarantine", "capacity": 16}
    ]
  })"));
}

struct Args {
  std::string lake;
  std::string out = "ascii";
  // init
  std::string init_path;
  // import
  std::string table, name, split_by, zone = "raw";
  size_t splits = 4;
  bool strict = false;
  bool lenient = false;
  // flow
  std::string spec;
  std::optional<uint64_t> limit;
  std::optional<uint64_t> seed;
  std::optional<uint64_t> duration_ms;
  bool resume = false;
  // schema
  std::string dataset;
  std::optional<uint64_t> sample;
  // reports
  size_t k = 10;
  std::string sales = "raw/sales", products = "raw/product", tweets = "raw/tweets";
  std::string brands_file, positive_file, negative_file;
  // lineage / provenance
  std::string node, uuid;
  // demo
  uint64_t demo_tweets = 5000;
  uint64_t demo_sales = 1000;
};

ReadMode read_mode(const LakeConfig& cfg, const Args& a) {
  if (a.strict) return ReadMode::kStrict;
  if (a.lenient) return ReadMode::kLenient;
  return cfg.strict_mode ? ReadMode::kStrict : ReadMode::kLenient;
}

void cmd_top_brands(const fs::path& root, const Args& a, OutFormat fmt, std::ostream& out) {
  LakeStore store(root);
  Catalog catalog(root);
  query::LakeScanProvider provider(store, ReadMode::kLenient, &catalog);
  auto sales = bestselling_brands(provider, a.sales, a.products, a.k);
  auto mentions = brand_mentions(provider, a.tweets, brand_lexicon(root, a.brands_file));
  auto rows = sales_vs_mentions(sales, mentions);
  switch (fmt) {
    case OutFormat::kCsv: out << report::sales_mentions_csv(rows); break;
    case OutFormat::kJson: out << report::sales_mentions_json(rows); break;
    case OutFormat::kAscii: out << report::sales_mentions_ascii(rows); break;
  }
}

int cmd_demo(const Args& a, uint64_t seed, OutFormat fmt, std::ostream& out, std::ostream& err) {
  fs::path root;
  if (!a.lake.empty() || std::getenv("LAKE_ROOT")) {
    root = resolve_root(a.lake);
  } else {
    std::string tmpl = (fs::temp_directory_path() / "lakelet-demo-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) throw_error(ErrorCode::kIoError, "cannot create a demo directory");
    root = tmpl;
  }
  std::error_code ec;
  if (fs::exists(root, ec) && !fs::is_empty(root, ec)) {
    throw_error(ErrorCode::kInvalidArgument, "demo needs a new or empty directory: " + root.string());
  }
  err << "demo lake: " << root.string() << "\n";
  init_lake(root);

  FixtureOptions fo;
  fo.seed = seed;
  fo.sales_rows = a.demo_sales;
  auto tables = generate_fixtures(fo);
  auto paths = write_fixtures(root / "sources", fo);

  LakeStore store(root);
  Catalog catalog(root);
  for (const auto& t : tables) {
    TableSource src{paths.at(t.name), t.name, t.split_column};
    auto r = import_table(store, catalog, src, DatasetId{Zone::kRaw, t.name}, ImportOptions{4, false});
    warn_import(r, err);
    err << "imported " << r.dataset << ": " << r.rows_imported << " rows in " << r.files_written << " files\n";
  }

  FlowGraph graph = build_graph(demo_flow_spec());
  RunOptions ro;
  ro.record_limit = a.demo_tweets;
  ro.seed = seed;
  auto fr = run_flow(graph, store, catalog, ro);
  err << "flow " << fr.run_id << ": in=" << fr.records_in << " out=" << fr.records_out
      << " dropped=" << fr.records_dropped << " files=" << fr.files_committed << "\n";

  cmd_top_brands(root, a, fmt, out);
  return kExitOk;
}

}  // namespace

int exit_code_for(ErrorCode code) { return kExitErrorBase + static_cast<int>(code); }

fs::path config_path(const fs::path& root) { return root / "lake.json"; }

json LakeConfig::to_json() const {
  return json{{"lake_root", lake_root.string()}, {"default_seed", default_seed}, {"strict_mode", strict_mode}};
}

LakeConfig LakeConfig::from_json(const json& j) {
  try {
    LakeConfig c;
    c.lake_root = j.at("lake_root").get<std::string>();
    c.default_seed = j.value("default_seed", uint64_t{42});
    c.strict_mode = j.value("strict_mode", false);
    return c;
  } catch (const json::exception& e) {
    throw_error(ErrorCode::kNotALake, std::string("malformed lake config: ") + e.what());
  }
}

LakeConfig LakeConfig::load(const fs::path& root) {
  std::ifstream in(config_path(root));
  if (!in) throw_error(ErrorCode::kNotALake, root.string() + " is not a lake (no lake.json); run `lake init`");
  auto j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw_error(ErrorCode::kNotALake, config_path(root).string() + " is not valid JSON");
  LakeConfig c = from_json(j);
  c.lake_root = root;  // the directory may have moved since init
  return c;
}

void LakeConfig::save() const {
  fs::create_directories(lake_root);
  std::string tmp = config_path(lake_root).string() + ".tmp-cfg";
  {
    std::ofstream o(tmp, std::ios::trunc);
    o << to_json().dump(2) << "\n";
    if (!o) throw_error(ErrorCode::kIoError, "cannot write " + tmp);
  }
  fs::rename(tmp, config_path(lake_root));
}

bool init_lake(const fs::path& root) {
  std::error_code ec;
  if (fs::exists(config_path(root), ec)) {
    LakeConfig::load(root);  // must parse
    return false;
  }
  if (fs::exists(root, ec)) {
    if (!fs::is_directory(root, ec)) throw_error(ErrorCode::kNotALake, root.string() + " is not a directory");
    if (!fs::is_empty(root, ec)) {
      throw_error(ErrorCode::kNotALake, root.string() + " is not empty and not a lake; refusing to init");
    }
  }
  for (const char* d : kLayoutDirs) fs::create_directories(root / d);
  auto write_default = [&](const char* name, std::string_view text) {
    std::ofstream o(root / "lexicons" / name);
    o << text;
  };
  write_default("positive.txt", default_positive_words_text());
  write_default("negative.txt", default_negative_words_text());
  write_default("brands.txt", default_brands_text());
  Catalog(root).ensure_file();
  LakeConfig cfg;
  cfg.lake_root = fs::absolute(root);
  cfg.save();
  return true;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"lakelet: a single-node data lake", "lake"};
  app.require_subcommand(1);
  app.fallthrough();
  Args a;
  app.add_option("--lake", a.lake, "Lake root directory (default: $LAKE_ROOT)");
  app.add_option("--out", a.out, "Output format")->check(CLI::IsMember({"ascii", "csv", "json"}));

  auto* init = app.add_subcommand("init", "Create the lake layout");
  init->add_option("path", a.init_path, "Lake root (default: --lake or $LAKE_ROOT)");

  auto* imp = app.add_subcommand("import", "Split-parallel import of a CSV table into the raw zone");
  imp->add_option("--table", a.table, "CSV file with a header row")->required();
  imp->add_option("--name", a.name, "Target dataset name")->required();
  imp->add_option("--split-by", a.split_by, "Integer column to split on");
  imp->add_option("--splits", a.splits, "Number of parallel splits")->check(CLI::PositiveNumber);
  imp->add_option("--zone", a.zone, "Target zone")->check(CLI::IsMember({"landing", "raw", "curated"}));
  imp->add_flag("--strict", a.strict, "Abort on a malformed row");

  auto* flow = app.add_subcommand("flow", "Streaming flows");
  flow->require_subcommand(1);
  auto* flow_run = flow->add_subcommand("run", "Run a flow graph");
  flow_run->add_option("--spec", a.spec, "Flow graph JSON")->required();
  flow_run->add_option("--limit", a.limit, "Records per source");
  flow_run->add_option("--seed", a.seed, "Seed for generated sources");
  flow_run->add_option("--duration-ms", a.duration_ms, "Stop sources after this long");
  flow_run->add_flag("--resume", a.resume, "Continue from the last checkpoint");

  auto* schema = app.add_subcommand("schema", "Schema-on-read");
  schema->require_subcommand(1);
  auto* infer = schema->add_subcommand("infer", "Infer a dataset's schema");
  infer->add_option("--dataset", a.dataset, "zone/name")->required();
  infer->add_option("--sample", a.sample, "Rows to sample");
  infer->add_flag("--strict", a.strict, "Fail on malformed records");
  infer->add_flag("--lenient", a.lenient, "Skip malformed records");

  auto* rep = app.add_subcommand("report", "Analytics reports");
  rep->require_subcommand(1);
  auto* top = rep->add_subcommand("top-brands", "Bestselling brands against tweet mentions");
  top->add_option("--k", a.k, "Number of brands")->check(CLI::PositiveNumber);
  top->add_option("--sales", a.sales, "Sales dataset");
  top->add_option("--products", a.products, "Product dataset");
  top->add_option("--tweets", a.tweets, "Tweet dataset");
  top->add_option("--brands", a.brands_file, "Brand lexicon file");
  auto* senti = rep->add_subcommand("sentiment", "Mean lexicon sentiment per brand");
  senti->add_option("--tweets", a.tweets, "Tweet dataset");
  senti->add_option("--brands", a.brands_file, "Brand lexicon file");
  senti->add_option("--positive", a.positive_file, "Positive word list");
  senti->add_option("--negative", a.negative_file, "Negative word list");

  auto* lin = app.add_subcommand("lineage", "Upstream lineage of a catalog node");
  lin->add_option("node", a.node, "e.g. dataset:raw/tweets")->required();

  auto* prov = app.add_subcommand("provenance", "Provenance events of a flow record");
  prov->add_option("uuid", a.uuid, "Record uuid")->required();

  auto* ds = app.add_subcommand("datasets", "Catalog datasets");
  ds->require_subcommand(1);
  auto* ls = ds->add_subcommand("ls", "List datasets");

  auto* demo = app.add_subcommand("demo", "Import fixtures, stream tweets and print the top-brands report");
  demo->add_option("--seed", a.seed, "Seed for fixtures and tweets");
  demo->add_option("--tweets", a.demo_tweets, "Tweets to stream");
  demo->add_option("--sales-rows", a.demo_sales, "Sales rows to generate");
  demo->add_option("--k", a.k, "Number of brands")->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const OutFormat fmt = parse_format(a.out);
  try {
    if (*init) {
      fs::path root = a.init_path.empty() ? resolve_root(a.lake) : fs::absolute(a.init_path);
      bool created = init_lake(root);
      out << (created ? "initialized lake at " : "already a lake: ") << root.string() << "\n";
      return kExitOk;
    }
    if (*demo) return cmd_demo(a, a.seed.value_or(42), fmt, out, err);

    const fs::path root = resolve_root(a.lake);
    const LakeConfig cfg = LakeConfig::load(root);

    if (*imp) {
      LakeStore store(root);
      Catalog catalog(root);
      TableSource src{a.table, fs::path(a.table).stem().string(), std::nullopt};
      if (!a.split_by.empty()) src.split_column = a.split_by;
      ImportOptions opts{a.splits, a.strict || cfg.strict_mode};
      auto r = import_table(store, catalog, src, DatasetId{zone_from_string(a.zone), a.name}, opts);
      warn_import(r, err);
      render_kv(as_kv(import_report_json(r)), fmt, out);
      return kExitOk;
    }
    if (*flow_run) {
      LakeStore store(root);
      Catalog catalog(root);
      FlowGraph graph = build_graph(FlowGraphSpec::load(a.spec));
      RunOptions ro;
      ro.record_limit = a.limit;
      ro.seed = a.seed;
      if (a.duration_ms) ro.duration = std::chrono::milliseconds(*a.duration_ms);
      ro.resume = a.resume;
      auto r = run_flow(graph, store, catalog, ro);
      render_kv(as_kv(flow_report_json(r)), fmt, out);
      return kExitOk;
    }
    if (*infer) {
      LakeStore store(root);
      Catalog catalog(root);
      DatasetId id = DatasetId::parse(a.dataset);
      if (!catalog.find_dataset(id) && store.current_version(id) == 0) {
        throw_error(ErrorCode::kUnknownDataset, "unknown dataset " + a.dataset);
      }
      InferOptions io{a.sample, read_mode(cfg, a)};
      InferStats stats;
      SchemaDescriptor s = infer_schema(store, id, io, &stats);
      if (stats.records_skipped > 0) err << "warning: skipped " << stats.records_skipped << " malformed records\n";
      if (fmt == OutFormat::kCsv) {
        Grid g{{"name", "dtype", "nullable"}, {}};
        for (const auto& f : s.fields) g.rows.push_back({f.name, std::string(to_string(f.dtype)), f.nullable});
        render(g, fmt, out);
      } else {
        out << json(s).dump(2) << "\n";
      }
      return kExitOk;
    }
    if (*top) {
      cmd_top_brands(root, a, fmt, out);
      return kExitOk;
    }
    if (*senti) {
      LakeStore store(root);
      Catalog catalog(root);
      query::LakeScanProvider provider(store, ReadMode::kLenient, &catalog);
      auto s = brand_sentiment(provider, a.tweets, brand_lexicon(root, a.brands_file),
                               sentiment_lexicon(root, a.positive_file, a.negative_file));
      switch (fmt) {
        case OutFormat::kCsv: out << report::sentiment_csv(s); break;
        case OutFormat::kJson: out << report::sentiment_json(s); break;
        case OutFormat::kAscii: out << report::sentiment_ascii(s); break;
      }
      return kExitOk;
    }
    if (*lin) {
      Catalog catalog(root);
      Grid g{{"from", "to", "job_kind", "at"}, {}};
      for (const auto& e : catalog.lineage_of(a.node)) {
        g.rows.push_back({e.from_node, e.to_node, std::string(to_string(e.job_kind)), e.at});
      }
      render(g, fmt, out);
      return kExitOk;
    }
    if (*prov) {
      auto u = Uuid::parse(a.uuid);
      if (!u) throw_error(ErrorCode::kInvalidArgument, "not a uuid: " + a.uuid);
      Grid g{{"at", "processor", "kind", "detail"}, {}};
      for (const auto& e : provenance_query(root, *u)) {
        g.rows.push_back({iso8601_utc(e.at), e.processor, std::string(to_string(e.kind)), e.detail});
      }
      render(g, fmt, out);
      return kExitOk;
    }
    if (*ls) {
      LakeStore store(root);
      Catalog catalog(root);
      Grid g{{"dataset", "format", "version", "files", "records", "source", "created_at"}, {}};
      for (const auto& d : catalog.datasets()) {
        auto files = store.list_objects(d.id());
        uint64_t records = 0;
        for (const auto& f : files) records += f.record_count.value_or(0);
        g.rows.push_back({d.id().to_string(), std::string(to_string(d.format)), store.current_version(d.id()),
                          files.size(), records, d.source, d.created_at});
      }
      render(g, fmt, out);
      return kExitOk;
    }
    err << app.help();
    return kExitUsage;
  } catch (const LakeError& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace lakelet::cli
