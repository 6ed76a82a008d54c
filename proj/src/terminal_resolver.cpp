#include "askdb/terminal_resolver.hpp"

#include <algorithm>
#include <set>

#include "askdb/error.hpp"
#include "askdb/number_words.hpp"
#include "askdb/sqlite.hpp"
#include "askdb/text.hpp"

namespace askdb {

std::string_view to_string(ResolutionMethod m) {
  switch (m) {
    case ResolutionMethod::Exact:
      return "exact";
    case ResolutionMethod::SpellCorrected:
      return "spell_corrected";
    case ResolutionMethod::Bigram:
      return "bigram";
    case ResolutionMethod::NumericOrder:
      return "numeric_order";
    case ResolutionMethod::Datetime:
      return "datetime";
  }
  return "exact";
}

std::string sql_string_literal(std::string_view value) {
  std::string out = "'";
  for (char c : value) {
    if (c == '\'') out.push_back('\'');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

// ---------------------------------------------------------------------------
// Value indexes

ValueIndex ValueIndex::build(std::string table, std::string column,
                             std::vector<std::string> values) {
  ValueIndex idx;
  idx.table = std::move(table);
  idx.column = std::move(column);
  idx.values = std::move(values);
  idx.cleaned.reserve(idx.values.size());
  for (std::size_t i = 0; i < idx.values.size(); ++i) {
    auto tokens = text::clean_tokens(idx.values[i]);
    for (const auto& t : tokens) idx.tokens.add(t);
    idx.cleaned.push_back(text::join(tokens, " "));
    if (!idx.cleaned.back().empty()) idx.by_cleaned[idx.cleaned.back()].push_back(i);
  }
  return idx;
}

std::vector<std::string> SqliteValueSource::distinct_values(const std::string& table,
                                                            const std::string& column) {
  sqlite::Database db(path_, sqlite::OpenMode::ReadOnly);
  db.restrict_to_reads();
  auto col = sqlite::quote_identifier(column);
  auto st = db.prepare("SELECT DISTINCT " + col + " FROM " + sqlite::quote_identifier(table) +
                       " WHERE " + col + " IS NOT NULL");
  std::vector<std::string> out;
  while (st.step()) out.push_back(value_to_text(st.column(0)));
  return out;
}

ValueIndexCache::ValueIndexCache(std::shared_ptr<ValueSource> source, std::size_t max_values)
    : source_(std::move(source)), max_values_(max_values) {}

std::size_t ValueIndexCache::builds() const {
  std::lock_guard lock(mu_);
  return builds_;
}

std::shared_ptr<const ValueIndex> ValueIndexCache::get(const std::string& table,
                                                       const std::string& column) {
  Key key{text::to_lower(table), text::to_lower(column)};
  std::promise<std::shared_ptr<const ValueIndex>> promise;
  std::shared_future<std::shared_ptr<const ValueIndex>> pending;
  {
    std::lock_guard lock(mu_);
    auto it = entries_.find(key);
    if (it != entries_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second.lru);
      pending = it->second.future;
    } else {
      lru_.push_front(key);
      entries_[key] = Entry{promise.get_future().share(), 0, lru_.begin()};
      ++builds_;
    }
  }
  if (pending.valid()) return pending.get();
  try {
    auto index = std::make_shared<const ValueIndex>(
        ValueIndex::build(table, column, source_->distinct_values(table, column)));
    promise.set_value(index);
    std::lock_guard lock(mu_);
    auto it = entries_.find(key);
    if (it != entries_.end()) {
      it->second.size = index->values.size();
      cached_values_ += index->values.size();
      evict_locked(key);
    }
    return index;
  } catch (...) {
    promise.set_exception(std::current_exception());
    std::lock_guard lock(mu_);
    auto it = entries_.find(key);
    if (it != entries_.end()) {
      lru_.erase(it->second.lru);
      entries_.erase(it);
    }
    throw;
  }
}

void ValueIndexCache::evict_locked(const Key& keep) {
  while (cached_values_ > max_values_ && !lru_.empty()) {
    const Key& victim = lru_.back();
    if (victim == keep) break;
    auto it = entries_.find(victim);
    if (it != entries_.end()) {
      cached_values_ -= it->second.size;
      entries_.erase(it);
    }
    lru_.pop_back();
  }
}

// ---------------------------------------------------------------------------
// Textual branch

TextualOutcome resolve_textual(std::string_view query, const ValueIndex& index,
                               const Lexicon& lexicon) {
  TextualOutcome out;
  auto tokens = text::clean_tokens(query);
  std::vector<std::string> corrected(tokens.size());
  std::vector<bool> was_corrected(tokens.size(), false);
  std::vector<bool> stop(tokens.size(), false);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    stop[i] = lexicon.is_stopword(tokens[i]);
    if (stop[i]) {
      corrected[i] = tokens[i];
      continue;
    }
    Correction c = correct_token(tokens[i], lexicon.english, index.tokens);
    corrected[i] = c.corrected;
    was_corrected[i] = c.corrected != c.token;
    if (was_corrected[i]) out.corrections.push_back(c);
  }

  struct Hit {
    std::size_t length;
    std::size_t value;
    bool corrected;
  };
  std::vector<Hit> hits;
  auto lookup = [&](std::size_t first, std::size_t length) {
    std::string gram = corrected[first];
    bool any_corrected = was_corrected[first];
    for (std::size_t k = 1; k < length; ++k) {
      gram += " " + corrected[first + k];
      any_corrected = any_corrected || was_corrected[first + k];
    }
    auto it = index.by_cleaned.find(gram);
    if (it == index.by_cleaned.end()) return;
    for (std::size_t v : it->second) hits.push_back({length, v, any_corrected});
  };
  for (std::size_t i = 0; i < corrected.size(); ++i) {
    if (!stop[i]) lookup(i, 1);
    if (i + 1 < corrected.size() && !(stop[i] && stop[i + 1])) lookup(i, 2);
  }
  if (hits.empty()) return out;

  std::size_t longest = 0;
  for (const auto& h : hits) longest = std::max(longest, h.length);
  std::map<std::size_t, bool> best;  // value index -> matched via a corrected gram
  for (const auto& h : hits) {
    if (h.length != longest) continue;
    auto [it, inserted] = best.emplace(h.value, h.corrected);
    if (!inserted) it->second = it->second && h.corrected;
  }
  if (best.size() > 1) {
    // Same cleaned form under different spellings: prefer the one written verbatim.
    std::vector<std::size_t> verbatim;
    for (const auto& [v, _] : best) {
      if (query.find(index.values[v]) != std::string_view::npos) verbatim.push_back(v);
    }
    if (verbatim.size() == 1) {
      bool c = best[verbatim.front()];
      best.clear();
      best.emplace(verbatim.front(), c);
    }
  }
  if (best.size() > 1) {
    for (const auto& [v, _] : best) out.ambiguous.push_back(index.values[v]);
    std::sort(out.ambiguous.begin(), out.ambiguous.end());
    return out;
  }
  const auto& [value, via_correction] = *best.begin();
  ResolutionMethod method = via_correction   ? ResolutionMethod::SpellCorrected
                            : longest == 2   ? ResolutionMethod::Bigram
                                             : ResolutionMethod::Exact;
  out.match = TextualMatch{index.values[value], method};
  return out;
}

// ---------------------------------------------------------------------------
// Numeric and datetime branches

std::vector<std::optional<std::string>> resolve_numeric(std::string_view query,
                                                        std::size_t terminal_count) {
  auto numerals = extract_numerals(words_to_numbers(query));
  std::vector<std::optional<std::string>> out(terminal_count);
  for (std::size_t i = 0; i < terminal_count && i < numerals.size(); ++i) {
    out[i] = numerals[i].text;
  }
  return out;
}

std::vector<std::optional<std::string>> resolve_datetime(
    const std::vector<Substitution>& substitutions, std::size_t terminal_count) {
  std::vector<std::optional<std::string>> out(terminal_count);
  for (std::size_t i = 0; i < terminal_count && i < substitutions.size(); ++i) {
    const auto& t = substitutions[i].span.resolved;
    out[i] = calendar::to_compact({t.year, t.month.value_or(1), t.day.value_or(1)});
  }
  return out;
}

namespace {

// The query text outside temporal spans, each span replaced by one space so
// dates never feed the numeric branch.
std::string without_temporal_spans(const NormalizedQuery& q) {
  std::string out;
  std::size_t cursor = 0;
  for (const auto& s : q.substitutions) {
    out.append(q.original, cursor, s.span.start - cursor);
    out.push_back(' ');
    cursor = s.span.end;
  }
  out.append(q.original, cursor, std::string::npos);
  return out;
}

enum class DatePart { None, Day, Month, Year };

DatePart derived_date_part(const ColumnMeta& meta) {
  if (!meta.derived_from || meta.data_type != DataType::Numeric) return DatePart::None;
  const std::string& n = meta.cleaned_name;
  auto ends_with = [&](std::string_view suffix) {
    return n.size() >= suffix.size() && n.compare(n.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends_with("_day")) return DatePart::Day;
  if (ends_with("_month")) return DatePart::Month;
  if (ends_with("_year")) return DatePart::Year;
  return DatePart::None;
}

std::string unresolved_warning(const sql::ColumnRef& column, const std::string& detail) {
  return "Could not resolve the 'Terminal' value for " + column.qualified() + detail +
         "; please check the query again.";
}

}  // namespace

ResolutionResult resolve(const NormalizedQuery& query, std::string_view candidate_sql,
                         const OnboardedDatabase& schema, ValueIndexCache& values,
                         const Lexicon& lexicon) {
  ResolutionResult result;
  result.sql = std::string(candidate_sql);
  sql::ParsedQuery parsed = sql::parse(candidate_sql, &schema);
  auto terminals = sql::find_terminals(parsed);
  if (terminals.empty()) return result;

  struct Slot {
    const sql::TerminalRef* ref;
    std::optional<std::string> literal;  // SQL text to splice in
    std::optional<Replacement> replacement;
    std::string detail;
  };
  std::vector<Slot> slots;
  slots.reserve(terminals.size());
  std::vector<std::size_t> numeric, datetime;
  std::vector<std::pair<std::size_t, DatePart>> date_parts;

  for (const auto& t : terminals) {
    slots.push_back({&t, std::nullopt, std::nullopt, ""});
    std::size_t slot = slots.size() - 1;
    const ColumnMeta* meta = schema.find_column(t.column.table, t.column.column);
    if (!meta) {
      slots[slot].detail = " (column not found in schema)";
      continue;
    }
    if (auto part = derived_date_part(*meta); part != DatePart::None) {
      date_parts.emplace_back(slot, part);
      continue;
    }
    switch (meta->data_type) {
      case DataType::Numeric:
        numeric.push_back(slot);
        break;
      case DataType::Datetime:
        datetime.push_back(slot);
        break;
      case DataType::Textual: {
        auto index = values.get(t.column.table, meta->cleaned_name);
        auto outcome = resolve_textual(query.original, *index, lexicon);
        if (outcome.match) {
          slots[slot].literal = sql_string_literal(outcome.match->value);
          slots[slot].replacement = Replacement{t.column, outcome.match->value, outcome.match->method};
        } else if (!outcome.ambiguous.empty()) {
          std::vector<std::string> quoted;
          for (const auto& a : outcome.ambiguous) quoted.push_back("'" + a + "'");
          slots[slot].detail = " (ambiguous: " + text::join(quoted, " and ") + " both match)";
        }
        break;
      }
    }
  }

  if (!numeric.empty()) {
    auto assigned = resolve_numeric(without_temporal_spans(query), numeric.size());
    for (std::size_t i = 0; i < numeric.size(); ++i) {
      if (!assigned[i]) {
        slots[numeric[i]].detail = " (no number found in the question)";
        continue;
      }
      slots[numeric[i]].literal = *assigned[i];
      slots[numeric[i]].replacement =
          Replacement{slots[numeric[i]].ref->column, *assigned[i], ResolutionMethod::NumericOrder};
    }
  }
  if (!datetime.empty()) {
    auto assigned = resolve_datetime(query.substitutions, datetime.size());
    for (std::size_t i = 0; i < datetime.size(); ++i) {
      if (!assigned[i]) {
        slots[datetime[i]].detail = " (no date found in the question)";
        continue;
      }
      slots[datetime[i]].literal = sql_string_literal(*assigned[i]);
      slots[datetime[i]].replacement =
          Replacement{slots[datetime[i]].ref->column, *assigned[i], ResolutionMethod::Datetime};
    }
  }
  if (!date_parts.empty()) {
    // The i-th Terminal on a derived day/month/year column takes that
    // component from the i-th temporal span that has it, so one span can
    // serve a month and a year Terminal together.
    std::map<DatePart, std::size_t> cursors;
    for (auto [slot, part] : date_parts) {
      std::optional<int> v;
      std::size_t& cursor = cursors[part];
      while (cursor < query.substitutions.size() && !v) {
        const auto& r = query.substitutions[cursor++].span.resolved;
        if (part == DatePart::Year) v = r.year;
        if (part == DatePart::Month && r.month) v = static_cast<int>(*r.month);
        if (part == DatePart::Day && r.day) v = static_cast<int>(*r.day);
      }
      if (!v) {
        slots[slot].detail = " (no date found in the question)";
        continue;
      }
      slots[slot].literal = std::to_string(*v);
      slots[slot].replacement =
          Replacement{slots[slot].ref->column, std::to_string(*v), ResolutionMethod::Datetime};
    }
  }

  // Splice right to left so earlier offsets stay valid.
  for (auto it = slots.rbegin(); it != slots.rend(); ++it) {
    if (!it->literal) continue;
    result.sql.replace(it->ref->span.offset, it->ref->span.length, *it->literal);
  }
  for (const auto& s : slots) {
    if (s.replacement) {
      result.replacements.push_back(*s.replacement);
    } else {
      ++result.unresolved;
      result.warnings.push_back(unresolved_warning(s.ref->column, s.detail));
    }
  }
  return result;
}

}  // namespace askdb
