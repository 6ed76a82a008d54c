#include "askdb/onboarding.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "askdb/csv.hpp"
#include "askdb/error.hpp"
#include "askdb/text.hpp"

namespace askdb {

using nlohmann::json;

std::string_view to_string(DataType t) {
  switch (t) {
    case DataType::Textual:
      return "textual";
    case DataType::Numeric:
      return "numeric";
    case DataType::Datetime:
      return "datetime";
  }
  return "textual";
}

DataType data_type_from_string(std::string_view s) {
  if (s == "numeric") return DataType::Numeric;
  if (s == "datetime") return DataType::Datetime;
  if (s == "textual") return DataType::Textual;
  throw MalformedInput("unknown data type: " + std::string(s));
}

const ColumnMeta* TableMeta::find_column(std::string_view column) const {
  for (const auto& c : columns) {
    if (text::iequals(c.cleaned_name, column)) return &c;
  }
  return nullptr;
}

const TableMeta* OnboardedDatabase::find_table(std::string_view table) const {
  for (const auto& t : tables) {
    if (text::iequals(t.name, table)) return &t;
  }
  return nullptr;
}

const ColumnMeta* OnboardedDatabase::find_column(std::string_view table,
                                                 std::string_view column) const {
  const TableMeta* t = find_table(table);
  return t ? t->find_column(column) : nullptr;
}

std::string clean_identifier(std::string_view name) {
  // Every run of characters outside [A-Za-z0-9] (whitespace, punctuation,
  // underscores) becomes one underscore; leading/trailing ones are dropped.
  std::string out;
  bool pending_sep = false;
  for (char c : name) {
    auto uc = static_cast<unsigned char>(c);
    if (uc < 0x80 && text::is_alnum(c)) {
      if (pending_sep && !out.empty()) out.push_back('_');
      pending_sep = false;
      out.push_back(static_cast<char>(std::tolower(uc)));
    } else {
      pending_sep = true;
    }
  }
  if (out.empty()) {
    throw OnboardingError("identifier '" + std::string(name) +
                          "' has no alphanumeric content");
  }
  return out;
}

ColumnMeta apply_synonyms(const ColumnMeta& column, const std::vector<std::string>& synonyms,
                          std::span<const ColumnMeta> peer_columns) {
  ColumnMeta out = column;
  if (synonyms.empty()) return out;
  std::set<std::string> peer_tokens;
  for (const auto& peer : peer_columns) {
    for (auto& tok : text::split(peer.cleaned_name, '_')) peer_tokens.insert(tok);
  }
  for (const auto& syn : synonyms) {
    for (auto& tok : text::split(syn, '_')) {
      if (peer_tokens.count(tok)) {
        throw AmbiguityError("synonym '" + syn + "' for column '" + column.cleaned_name +
                             "' collides with another column's name");
      }
    }
    out.cleaned_name += "_" + syn;
    out.synonyms.push_back(syn);
  }
  return out;
}

std::vector<DerivedColumn> expand_datetime_column(
    const ColumnMeta& column, const DateFormat& format,
    std::span<const std::optional<std::string>> values) {
  const std::string& base = column.cleaned_name;
  auto make = [&](const std::string& suffix, DataType type) {
    DerivedColumn d;
    d.meta.original_name = base + suffix;
    d.meta.cleaned_name = base + suffix;
    d.meta.data_type = type;
    d.meta.derived_from = base;
    d.values.reserve(values.size());
    return d;
  };
  std::vector<DerivedColumn> out;
  out.push_back(make("_day", DataType::Numeric));
  out.push_back(make("_month", DataType::Numeric));
  out.push_back(make("_year", DataType::Numeric));
  out.push_back(make("_month_name_short", DataType::Textual));
  out.push_back(make("_month_name_long", DataType::Textual));

  for (std::size_t row = 0; row < values.size(); ++row) {
    const auto& raw = values[row];
    if (!raw) {
      for (auto& d : out) d.values.emplace_back(std::monostate{});
      continue;
    }
    auto date = format.parse(*raw);
    if (!date) {
      throw FormatMismatch(row, "value '" + *raw + "' in column '" + base +
                                    "' (row " + std::to_string(row) +
                                    ") does not match format " + format.pattern());
    }
    out[0].values.emplace_back(static_cast<std::int64_t>(date->day));
    out[1].values.emplace_back(static_cast<std::int64_t>(date->month));
    out[2].values.emplace_back(static_cast<std::int64_t>(date->year));
    out[3].values.emplace_back(std::string(calendar::month_name_short(date->month)));
    out[4].values.emplace_back(std::string(calendar::month_name_long(date->month)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Config

OnboardingConfig OnboardingConfig::from_json(std::string_view json_text) {
  OnboardingConfig cfg;
  if (text::trim(json_text).empty()) return cfg;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw OnboardingError(std::string("invalid onboarding config: ") + e.what());
  }
  if (!j.is_object()) throw OnboardingError("onboarding config must be a JSON object");
  try {
    if (j.contains("renames")) cfg.renames = j.at("renames").get<decltype(cfg.renames)>();
    if (j.contains("synonyms")) {
      cfg.synonym_map = j.at("synonyms").get<decltype(cfg.synonym_map)>();
    }
    if (j.contains("datetime_columns")) {
      cfg.datetime_columns = j.at("datetime_columns").get<decltype(cfg.datetime_columns)>();
    }
  } catch (const json::exception& e) {
    throw OnboardingError(std::string("invalid onboarding config: ") + e.what());
  }
  return cfg;
}

std::string OnboardingConfig::to_json() const {
  json j;
  j["renames"] = renames;
  j["synonyms"] = synonym_map;
  j["datetime_columns"] = datetime_columns;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Sources

namespace {

std::optional<double> parse_number(std::string_view s, bool& integral) {
  s = std::string_view(s.data(), s.size());
  if (s.empty()) return std::nullopt;
  std::int64_t i = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), i);
  if (ec == std::errc() && p == s.data() + s.size()) {
    integral = true;
    return static_cast<double>(i);
  }
  double d = 0;
  auto [p2, ec2] = std::from_chars(s.data(), s.data() + s.size(), d);
  if (ec2 == std::errc() && p2 == s.data() + s.size()) {
    integral = false;
    return d;
  }
  return std::nullopt;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw OnboardingError("cannot read source file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string file_stem(const std::string& path) {
  auto slash = path.find_last_of("/\\");
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  auto dot = base.find_last_of('.');
  return dot == std::string::npos || dot == 0 ? base : base.substr(0, dot);
}

bool affinity_numeric(const std::string& declared) {
  std::string t = text::to_upper(declared);
  for (const char* k : {"INT", "REAL", "FLOA", "DOUB", "NUM", "DEC"}) {
    if (t.find(k) != std::string::npos) return true;
  }
  return false;
}

std::optional<std::string> as_text(const Value& v) {
  if (is_null(v)) return std::nullopt;
  return value_to_text(v);
}

}  // namespace

std::vector<RawTable> load_csv_source(std::string_view content, std::string_view table_name) {
  csv::Table parsed;
  try {
    parsed = csv::parse(content);
  } catch (const MalformedInput& e) {
    throw OnboardingError(e.what());
  }
  RawTable t;
  t.name = std::string(table_name);
  t.columns = parsed.header;
  t.rows.reserve(parsed.rows.size());
  for (auto& r : parsed.rows) {
    std::vector<Value> row;
    row.reserve(r.size());
    for (auto& f : r) {
      if (!f || f->empty()) {
        row.emplace_back(std::monostate{});
      } else {
        row.emplace_back(*f);
      }
    }
    t.rows.push_back(std::move(row));
  }
  return {std::move(t)};
}

std::vector<RawTable> load_csv_file(const std::string& path) {
  return load_csv_source(read_file(path), file_stem(path));
}

std::vector<RawTable> load_sqlite_file(const std::string& path) {
  sqlite::Database db(path, sqlite::OpenMode::ReadOnly);
  std::vector<std::string> names;
  {
    auto st = db.prepare(
        "SELECT name FROM sqlite_master WHERE type = 'table' AND name NOT LIKE 'sqlite_%' "
        "ORDER BY rowid");
    while (st.step()) names.push_back(value_to_text(st.column(0)));
  }
  std::vector<RawTable> out;
  for (const auto& name : names) {
    RawTable t;
    t.name = name;
    {
      auto st = db.prepare("PRAGMA table_info(" + sqlite::quote_identifier(name) + ")");
      while (st.step()) {
        t.columns.push_back(value_to_text(st.column(1)));
        t.declared_types.push_back(value_to_text(st.column(2)));
      }
    }
    auto st = db.prepare("SELECT * FROM " + sqlite::quote_identifier(name));
    while (st.step()) {
      std::vector<Value> row;
      for (int i = 0; i < st.column_count(); ++i) row.push_back(st.column(i));
      t.rows.push_back(std::move(row));
    }
    out.push_back(std::move(t));
  }
  if (out.empty()) throw OnboardingError("SQLite source '" + path + "' has no tables");
  return out;
}

std::vector<RawTable> load_source_file(const std::string& path) {
  std::string head;
  {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw OnboardingError("cannot read source file '" + path + "'");
    head.resize(16);
    in.read(head.data(), 16);
    head.resize(static_cast<std::size_t>(in.gcount()));
  }
  if (head == std::string("SQLite format 3\0", 16)) return load_sqlite_file(path);
  return load_csv_file(path);
}

// ---------------------------------------------------------------------------
// Onboarding

namespace {

struct WorkColumn {
  ColumnMeta meta;
  std::size_t source_index = 0;
  bool integral = true;
  std::optional<DateFormat> format;
};

struct WorkTable {
  const RawTable* raw = nullptr;
  TableMeta meta;
  std::vector<WorkColumn> columns;
};

// Resolves a config key ("table.column" or "column") to (table, column)
// indices. Throws when the key matches nothing.
std::vector<std::pair<std::size_t, std::size_t>> resolve_key(
    const std::vector<RawTable>& source, const std::string& key, const char* section) {
  std::vector<std::pair<std::size_t, std::size_t>> hits;
  auto match_in = [&](std::size_t ti, std::string_view column) {
    const auto& cols = source[ti].columns;
    for (std::size_t ci = 0; ci < cols.size(); ++ci) {
      if (cols[ci] == column) hits.emplace_back(ti, ci);
    }
  };
  for (std::size_t ti = 0; ti < source.size(); ++ti) {
    const std::string& tname = source[ti].name;
    if (key.size() > tname.size() && key.compare(0, tname.size(), tname) == 0 &&
        key[tname.size()] == '.') {
      match_in(ti, std::string_view(key).substr(tname.size() + 1));
    }
  }
  if (hits.empty()) {
    for (std::size_t ti = 0; ti < source.size(); ++ti) match_in(ti, key);
  }
  if (hits.empty()) {
    throw OnboardingError(std::string("config ") + section + " references unknown column '" +
                          key + "'");
  }
  return hits;
}

}  // namespace

OnboardedDatabase onboard_database(const std::vector<RawTable>& source,
                                   const OnboardingConfig& config,
                                   const OnboardingTarget& target) {
  if (source.empty()) throw OnboardingError("source has no tables");

  // Per-(table, column) config, resolved against original names.
  std::map<std::pair<std::size_t, std::size_t>, std::string> renames;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::string>> synonyms;
  std::map<std::pair<std::size_t, std::size_t>, DateFormat> formats;
  for (const auto& [key, value] : config.renames) {
    for (auto hit : resolve_key(source, key, "renames")) renames[hit] = value;
  }
  for (const auto& [key, value] : config.synonym_map) {
    std::vector<std::string> cleaned;
    for (const auto& s : value) cleaned.push_back(clean_identifier(s));
    for (auto hit : resolve_key(source, key, "synonyms")) synonyms[hit] = cleaned;
  }
  for (const auto& [key, value] : config.datetime_columns) {
    auto format = DateFormat::compile(value);
    for (auto hit : resolve_key(source, key, "datetime_columns")) formats.emplace(hit, format);
  }

  OnboardedDatabase db;
  db.id = target.id;
  db.created_at = target.created_at;
  db.store_path = target.store_path;

  std::vector<WorkTable> work;
  std::set<std::string> table_names;
  for (std::size_t ti = 0; ti < source.size(); ++ti) {
    const RawTable& raw = source[ti];
    if (raw.columns.empty()) throw OnboardingError("table '" + raw.name + "' has no columns");
    WorkTable wt;
    wt.raw = &raw;
    wt.meta.original_name = raw.name;
    wt.meta.name = clean_identifier(raw.name);
    if (!table_names.insert(wt.meta.name).second) {
      throw OnboardingError("duplicate table identifier '" + wt.meta.name + "' after cleaning");
    }
    if (wt.meta.name != raw.name) db.rename_ledger.tables[raw.name] = wt.meta.name;

    for (std::size_t ci = 0; ci < raw.columns.size(); ++ci) {
      WorkColumn wc;
      wc.source_index = ci;
      wc.meta.original_name = raw.columns[ci];
      auto rn = renames.find({ti, ci});
      wc.meta.cleaned_name =
          clean_identifier(rn != renames.end() ? rn->second : raw.columns[ci]);

      auto fmt = formats.find({ti, ci});
      if (fmt != formats.end()) {
        wc.meta.data_type = DataType::Datetime;
        wc.meta.datetime_format = fmt->second.pattern();
        wc.format = fmt->second;
      } else {
        bool declared_numeric =
            ci < raw.declared_types.size() && affinity_numeric(raw.declared_types[ci]);
        bool all_numeric = true;
        bool any_value = false;
        for (const auto& row : raw.rows) {
          const Value& v = row.at(ci);
          if (is_null(v)) continue;
          any_value = true;
          if (std::holds_alternative<std::int64_t>(v)) continue;
          if (std::holds_alternative<double>(v)) {
            wc.integral = false;
            continue;
          }
          bool integral = true;
          if (!parse_number(std::get<std::string>(v), integral)) {
            all_numeric = false;
            break;
          }
          if (!integral) wc.integral = false;
        }
        bool numeric = declared_numeric ? all_numeric : (all_numeric && any_value);
        wc.meta.data_type = numeric ? DataType::Numeric : DataType::Textual;
      }
      wt.columns.push_back(std::move(wc));
    }
    work.push_back(std::move(wt));
  }

  // Synonyms are checked against every other column in the database.
  for (std::size_t ti = 0; ti < work.size(); ++ti) {
    for (std::size_t ci = 0; ci < work[ti].columns.size(); ++ci) {
      auto syn = synonyms.find({ti, work[ti].columns[ci].source_index});
      if (syn == synonyms.end()) continue;
      std::vector<ColumnMeta> peers;
      for (std::size_t tj = 0; tj < work.size(); ++tj) {
        for (std::size_t cj = 0; cj < work[tj].columns.size(); ++cj) {
          if (tj == ti && cj == ci) continue;
          peers.push_back(work[tj].columns[cj].meta);
        }
      }
      work[ti].columns[ci].meta = apply_synonyms(work[ti].columns[ci].meta, syn->second, peers);
    }
  }

  // Build the final column lists, with datetime expansions right after their source.
  struct OutColumn {
    ColumnMeta meta;
    std::vector<Value> values;
    std::string sql_type;
  };
  std::vector<std::vector<OutColumn>> out_tables;
  for (auto& wt : work) {
    std::vector<OutColumn> cols;
    std::set<std::string> seen;
    auto add = [&](OutColumn c) {
      if (!seen.insert(c.meta.cleaned_name).second) {
        throw OnboardingError("duplicate column identifier '" + c.meta.cleaned_name +
                              "' in table '" + wt.meta.name + "'");
      }
      cols.push_back(std::move(c));
    };
    for (auto& wc : wt.columns) {
      if (wc.meta.cleaned_name != wc.meta.original_name) {
        db.rename_ledger.columns[wt.meta.name][wc.meta.original_name] = wc.meta.cleaned_name;
      }
      OutColumn oc;
      oc.meta = wc.meta;
      oc.values.reserve(wt.raw->rows.size());
      if (wc.meta.data_type == DataType::Datetime) {
        std::vector<std::optional<std::string>> raw_values;
        raw_values.reserve(wt.raw->rows.size());
        for (const auto& row : wt.raw->rows) raw_values.push_back(as_text(row[wc.source_index]));
        auto derived = expand_datetime_column(wc.meta, *wc.format, raw_values);
        // The stored copy keeps datetimes in the same yyyymmdd form the
        // resolver inserts for datetime placeholders.
        for (const auto& rv : raw_values) {
          if (!rv) {
            oc.values.emplace_back(std::monostate{});
          } else {
            oc.values.emplace_back(calendar::to_compact(*wc.format->parse(*rv)));
          }
        }
        oc.sql_type = "DATE";
        std::string key = wt.meta.name + "." + wc.meta.cleaned_name;
        add(std::move(oc));
        for (auto& d : derived) {
          db.derived_columns[key].push_back(d.meta.cleaned_name);
          OutColumn dc;
          dc.meta = d.meta;
          dc.values = std::move(d.values);
          dc.sql_type = d.meta.data_type == DataType::Numeric ? "INTEGER" : "TEXT";
          add(std::move(dc));
        }
        continue;
      }
      for (const auto& row : wt.raw->rows) {
        const Value& v = row[wc.source_index];
        if (wc.meta.data_type == DataType::Numeric && std::holds_alternative<std::string>(v)) {
          const auto& s = std::get<std::string>(v);
          if (wc.integral) {
            std::int64_t i = 0;
            std::from_chars(s.data(), s.data() + s.size(), i);
            oc.values.emplace_back(i);
          } else {
            double d = 0;
            std::from_chars(s.data(), s.data() + s.size(), d);
            oc.values.emplace_back(d);
          }
        } else if (wc.meta.data_type == DataType::Textual && !is_null(v) &&
                   !std::holds_alternative<std::string>(v)) {
          oc.values.emplace_back(value_to_text(v));
        } else {
          oc.values.push_back(v);
        }
      }
      oc.sql_type = wc.meta.data_type == DataType::Numeric ? (wc.integral ? "INTEGER" : "REAL")
                                                          : "TEXT";
      add(std::move(oc));
    }
    for (auto& c : cols) wt.meta.columns.push_back(c.meta);
    out_tables.push_back(std::move(cols));
  }

  sqlite::Database store(target.store_path, sqlite::OpenMode::Create);
  store.exec("BEGIN");
  for (std::size_t ti = 0; ti < work.size(); ++ti) {
    const auto& cols = out_tables[ti];
    std::string create = "CREATE TABLE " + sqlite::quote_identifier(work[ti].meta.name) + " (";
    std::string insert = "INSERT INTO " + sqlite::quote_identifier(work[ti].meta.name) + " VALUES (";
    for (std::size_t ci = 0; ci < cols.size(); ++ci) {
      if (ci) {
        create += ", ";
        insert += ", ";
      }
      create += sqlite::quote_identifier(cols[ci].meta.cleaned_name) + " " + cols[ci].sql_type;
      insert += "?";
    }
    store.exec(create + ")");
    auto st = store.prepare(insert + ")");
    std::size_t nrows = work[ti].raw->rows.size();
    for (std::size_t r = 0; r < nrows; ++r) {
      for (std::size_t ci = 0; ci < cols.size(); ++ci) {
        st.bind(static_cast<int>(ci + 1), cols[ci].values[r]);
      }
      st.step();
      st.reset();
    }
    db.tables.push_back(std::move(work[ti].meta));
  }
  store.exec("COMMIT");
  return db;
}

// ---------------------------------------------------------------------------
// schema.json

std::string schema_to_json(const OnboardedDatabase& db) {
  json tables = json::array();
  for (const auto& t : db.tables) {
    json cols = json::array();
    for (const auto& c : t.columns) {
      json jc = {{"original_name", c.original_name},
                 {"cleaned_name", c.cleaned_name},
                 {"synonyms", c.synonyms},
                 {"data_type", to_string(c.data_type)}};
      if (c.datetime_format) jc["datetime_format"] = *c.datetime_format;
      if (c.derived_from) jc["derived_from"] = *c.derived_from;
      cols.push_back(std::move(jc));
    }
    tables.push_back({{"name", t.name}, {"original_name", t.original_name}, {"columns", cols}});
  }
  json j = {{"id", db.id},
            {"created_at", db.created_at},
            {"tables", tables},
            {"rename_ledger",
             {{"tables", db.rename_ledger.tables}, {"columns", db.rename_ledger.columns}}},
            {"derived_columns", db.derived_columns}};
  return j.dump(2);
}

OnboardedDatabase schema_from_json(std::string_view json_text) {
  OnboardedDatabase db;
  try {
    json j = json::parse(json_text);
    db.id = j.at("id").get<std::string>();
    db.created_at = j.value("created_at", "");
    for (const auto& jt : j.at("tables")) {
      TableMeta t;
      t.name = jt.at("name").get<std::string>();
      t.original_name = jt.value("original_name", t.name);
      for (const auto& jc : jt.at("columns")) {
        ColumnMeta c;
        c.original_name = jc.at("original_name").get<std::string>();
        c.cleaned_name = jc.at("cleaned_name").get<std::string>();
        c.synonyms = jc.value("synonyms", std::vector<std::string>{});
        c.data_type = data_type_from_string(jc.at("data_type").get<std::string>());
        if (jc.contains("datetime_format")) c.datetime_format = jc["datetime_format"].get<std::string>();
        if (jc.contains("derived_from")) c.derived_from = jc["derived_from"].get<std::string>();
        t.columns.push_back(std::move(c));
      }
      db.tables.push_back(std::move(t));
    }
    const auto& ledger = j.at("rename_ledger");
    db.rename_ledger.tables = ledger.at("tables").get<decltype(db.rename_ledger.tables)>();
    db.rename_ledger.columns = ledger.at("columns").get<decltype(db.rename_ledger.columns)>();
    db.derived_columns = j.at("derived_columns").get<decltype(db.derived_columns)>();
  } catch (const json::exception& e) {
    throw MalformedInput(std::string("invalid schema.json: ") + e.what());
  }
  return db;
}

}  // namespace askdb
