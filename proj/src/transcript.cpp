#include "voicemark/transcript.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include <json.hpp>

namespace voicemark::transcript {
namespace {

using Kind = ParseError::Kind;

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto at = s.find(sep, start);
    if (at == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, at - start));
    start = at + 1;
  }
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::optional<int> parse_int(std::string_view s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

struct PendingSentence {
  Sentence tokens;
  std::vector<std::size_t> lines;
  std::string text;
  bool has_content = false;
};

void validate_sentence(const PendingSentence& s, std::size_t sentence_index) {
  const int n = static_cast<int>(s.tokens.size());
  int roots = 0;
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    const auto& tok = s.tokens[i];
    if (tok.head < 0 || tok.head > n) {
      throw ParseError(Kind::HeadOutOfRange, s.lines[i],
                       "head " + std::to_string(tok.head) + " outside 0.." + std::to_string(n));
    }
    if (tok.head == 0) ++roots;
  }
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    int cur = s.tokens[i].id;
    for (int steps = 0; cur != 0; ++steps) {
      if (steps > n) {
        throw ParseError(Kind::HeadCycle, s.lines[i],
                         "head cycle in sentence " + std::to_string(sentence_index + 1) + " through token " +
                             std::to_string(s.tokens[i].id));
      }
      cur = s.tokens[static_cast<std::size_t>(cur - 1)].head;
    }
  }
  if (roots > 1) {
    throw ParseError(Kind::MultipleRoots, s.lines.front(),
                     "sentence " + std::to_string(sentence_index + 1) + " has " + std::to_string(roots) + " roots");
  }
}

class BracketParser {
 public:
  explicit BracketParser(std::string_view text) : text_(text) {}

  std::vector<ConstituencyTree> parse_all() {
    std::vector<ConstituencyTree> out;
    while (true) {
      skip_space();
      if (pos_ >= text_.size()) break;
      if (text_[pos_] == ')') fail(Kind::UnbalancedParentheses, "unexpected ')'");
      if (text_[pos_] != '(') fail(Kind::UnbalancedParentheses, "expected '(' at top level");
      out.push_back(parse_node());
    }
    return out;
  }

 private:
  [[noreturn]] void fail(Kind kind, const std::string& what) const {
    const auto line = static_cast<std::size_t>(std::count(text_.begin(), text_.begin() + static_cast<std::ptrdiff_t>(std::min(pos_, text_.size())), '\n')) + 1;
    throw ParseError(kind, line, "bracketed tree: " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string atom() {
    const auto start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
           text_[pos_] != ')') {
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  ConstituencyTree parse_node() {
    ++pos_;  // '('
    ConstituencyTree node;
    skip_space();
    if (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')') node.label = atom();
    while (true) {
      skip_space();
      if (pos_ >= text_.size()) fail(Kind::UnbalancedParentheses, "unbalanced parentheses: missing ')'");
      const char c = text_[pos_];
      if (c == ')') {
        ++pos_;
        break;
      }
      if (c == '(') {
        node.children.push_back(parse_node());
      } else {
        ConstituencyTree leaf;
        leaf.leaf = atom();
        node.children.push_back(std::move(leaf));
      }
    }
    if (node.children.empty()) fail(Kind::EmptyNode, "empty node" + (node.label.empty() ? std::string() : " '" + node.label + "'"));
    return node;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

bool Token::has_feat(std::string_view key, std::string_view value) const {
  return std::any_of(feats.begin(), feats.end(), [&](const auto& kv) { return kv.first == key && kv.second == value; });
}

std::optional<std::string> Token::feat(std::string_view key) const {
  for (const auto& [k, v] : feats) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string Token::feats_string() const {
  if (feats.empty()) return "_";
  std::string out;
  for (const auto& [k, v] : feats) {
    if (!out.empty()) out += '|';
    out += k;
    out += '=';
    out += v;
  }
  return out;
}

int ConstituencyTree::depth() const {
  int deepest = 0;
  for (const auto& child : children) deepest = std::max(deepest, child.depth());
  return deepest + (label.empty() ? 0 : 1);
}

std::size_t AnnotatedTranscript::token_count() const noexcept {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

std::size_t AnnotatedTranscript::word_count() const noexcept {
  std::size_t n = 0;
  for (const auto& s : sentences) {
    for (const auto& tok : s) n += tok.is_punct() ? 0 : 1;
  }
  return n;
}

std::string AnnotatedTranscript::text() const {
  if (raw_text) return *raw_text;
  std::string out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    std::string sentence;
    if (i < sentence_texts.size() && !sentence_texts[i].empty()) {
      sentence = sentence_texts[i];
    } else {
      for (const auto& tok : sentences[i]) {
        if (!sentence.empty()) sentence += ' ';
        sentence += tok.form;
      }
    }
    if (!out.empty() && !sentence.empty()) out += ' ';
    out += sentence;
  }
  return out;
}

AnnotatedTranscript parse_conllu(std::string_view text) {
  AnnotatedTranscript out;
  PendingSentence current;
  auto flush = [&]() {
    if (!current.tokens.empty()) {
      validate_sentence(current, out.sentences.size());
      out.sentences.push_back(std::move(current.tokens));
      out.sentence_texts.push_back(std::move(current.text));
    }
    current = PendingSentence{};
  };

  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    if (trim(raw).empty()) {
      flush();
      continue;
    }
    if (raw.front() == '#') {
      const auto body = trim(raw.substr(1));
      if (body.starts_with("text")) {
        const auto eq = body.find('=');
        if (eq != std::string_view::npos && trim(body.substr(4, eq - 4)).empty()) {
          current.text = std::string(trim(body.substr(eq + 1)));
        }
      }
      continue;
    }
    const auto cols = split(raw, '\t');
    if (cols.size() != 10) {
      throw ParseError(Kind::ColumnCount, line_no, "expected 10 tab-separated columns, found " + std::to_string(cols.size()));
    }
    if (cols[0].find('-') != std::string_view::npos || cols[0].find('.') != std::string_view::npos) continue;
    const auto id = parse_int(cols[0]);
    if (!id) throw ParseError(Kind::BadField, line_no, "bad token id '" + std::string(cols[0]) + "'");
    const int expected = static_cast<int>(current.tokens.size()) + 1;
    if (*id != expected) {
      throw ParseError(Kind::NonContiguousId, line_no,
                       "token id " + std::to_string(*id) + " where " + std::to_string(expected) + " was expected");
    }
    const auto head = parse_int(cols[6]);
    if (!head) throw ParseError(Kind::BadField, line_no, "bad head '" + std::string(cols[6]) + "'");

    Token tok;
    tok.id = *id;
    tok.form = std::string(cols[1]);
    tok.lemma = std::string(cols[2]);
    tok.upos = std::string(cols[3]);
    tok.xpos = std::string(cols[4]);
    if (cols[5] != "_") {
      for (auto kv : split(cols[5], '|')) {
        const auto eq = kv.find('=');
        if (eq == std::string_view::npos) throw ParseError(Kind::BadField, line_no, "bad feature '" + std::string(kv) + "'");
        tok.feats.emplace_back(std::string(kv.substr(0, eq)), std::string(kv.substr(eq + 1)));
      }
    }
    tok.head = *head;
    tok.deprel = std::string(cols[7]);
    tok.deps = std::string(cols[8]);
    tok.misc = std::string(cols[9]);
    current.tokens.push_back(std::move(tok));
    current.lines.push_back(line_no);
  }
  flush();
  return out;
}

std::string serialize_conllu(const AnnotatedTranscript& t) {
  std::ostringstream out;
  for (std::size_t s = 0; s < t.sentences.size(); ++s) {
    if (s < t.sentence_texts.size() && !t.sentence_texts[s].empty()) out << "# text = " << t.sentence_texts[s] << '\n';
    for (const auto& tok : t.sentences[s]) {
      out << tok.id << '\t' << tok.form << '\t' << tok.lemma << '\t' << tok.upos << '\t' << tok.xpos << '\t'
          << tok.feats_string() << '\t' << tok.head << '\t' << tok.deprel << '\t' << tok.deps << '\t' << tok.misc
          << '\n';
    }
    out << '\n';
  }
  return out.str();
}

std::vector<ConstituencyTree> parse_bracketed(std::string_view text) { return BracketParser(text).parse_all(); }

std::string serialize_bracketed(const ConstituencyTree& tree) {
  if (tree.leaf) return *tree.leaf;
  std::string out = "(" + tree.label;
  for (const auto& child : tree.children) {
    if (out.size() > 1) out += ' ';
    out += serialize_bracketed(child);
  }
  return out + ")";
}

std::vector<std::vector<double>> parse_embeddings(std::string_view jsonl) {
  static const std::regex non_finite(R"((^|[^A-Za-z"])-?(NaN|Infinity)\b)");
  std::map<long long, std::pair<std::vector<double>, std::size_t>> by_index;
  std::size_t dim = 0;
  std::size_t line_no = 0;
  for (auto raw : split(jsonl, '\n')) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    const std::string owned(line);
    if (std::regex_search(owned, non_finite)) throw ParseError(Kind::NonFinite, line_no, "non-finite vector component");
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(owned);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(Kind::BadField, line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object() || !obj.contains("index") || !obj["index"].is_number_integer()) {
      throw ParseError(Kind::MissingIndex, line_no, "record lacks an integer \"index\"");
    }
    if (!obj.contains("vector") || !obj["vector"].is_array()) {
      throw ParseError(Kind::BadField, line_no, "record lacks a \"vector\" array");
    }
    std::vector<double> vec;
    for (const auto& v : obj["vector"]) {
      if (!v.is_number()) throw ParseError(Kind::NonFinite, line_no, "non-numeric vector component");
      const double d = v.get<double>();
      if (!std::isfinite(d)) throw ParseError(Kind::NonFinite, line_no, "non-finite vector component");
      vec.push_back(d);
    }
    if (vec.empty()) throw ParseError(Kind::DimensionMismatch, line_no, "empty vector");
    if (dim == 0) dim = vec.size();
    if (vec.size() != dim) {
      throw ParseError(Kind::DimensionMismatch, line_no,
                       "vector has dimension " + std::to_string(vec.size()) + ", expected " + std::to_string(dim));
    }
    const auto index = obj["index"].get<long long>();
    if (!by_index.emplace(index, std::make_pair(std::move(vec), line_no)).second) {
      throw ParseError(Kind::BadField, line_no, "duplicate index " + std::to_string(index));
    }
  }
  std::vector<std::vector<double>> out;
  long long expected = 0;
  for (auto& [index, entry] : by_index) {
    if (index != expected) throw ParseError(Kind::MissingIndex, entry.second, "missing index " + std::to_string(expected));
    out.push_back(std::move(entry.first));
    ++expected;
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<double>> load_embeddings(const std::string& path) {
  return parse_embeddings(read_text_file(path));
}

void attach_trees(AnnotatedTranscript& t, std::vector<ConstituencyTree> trees) {
  if (trees.size() != t.sentences.size()) {
    throw ParseError(Kind::CountMismatch, 0,
                     std::to_string(trees.size()) + " trees for " + std::to_string(t.sentences.size()) + " sentences");
  }
  t.trees = std::move(trees);
}

void attach_embeddings(AnnotatedTranscript& t, std::vector<std::vector<double>> embeddings) {
  if (embeddings.size() != t.sentences.size()) {
    throw ParseError(Kind::CountMismatch, 0,
                     std::to_string(embeddings.size()) + " embeddings for " + std::to_string(t.sentences.size()) +
                         " sentences");
  }
  t.embeddings = std::move(embeddings);
}

AnnotatedTranscript load_transcript(const std::string& conllu_path, const std::string& trees_path,
                                    const std::string& embeddings_path) {
  auto t = parse_conllu(read_text_file(conllu_path));
  if (!trees_path.empty()) attach_trees(t, parse_bracketed(read_text_file(trees_path)));
  if (!embeddings_path.empty()) attach_embeddings(t, load_embeddings(embeddings_path));
  return t;
}

}  // namespace voicemark::transcript
