#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace voicemark::transcript {

struct Token {
  int id = 0;  // 1-based within the sentence
  std::string form;
  std::string lemma;
  std::string upos;
  std::string xpos = "_";
  std::vector<std::pair<std::string, std::string>> feats;
  int head = 0;  // 0 = root
  std::string deprel;
  std::string deps = "_";
  std::string misc = "_";

  [[nodiscard]] bool has_feat(std::string_view key, std::string_view value) const;
  [[nodiscard]] std::optional<std::string> feat(std::string_view key) const;
  /// Feats in CoNLL-U column syntax ("_" when empty).
  [[nodiscard]] std::string feats_string() const;
  [[nodiscard]] bool is_punct() const noexcept { return upos == "PUNCT"; }

  friend bool operator==(const Token&, const Token&) = default;
};

using Sentence = std::vector<Token>;

struct ConstituencyTree {
  std::string label;                 // empty for leaves and unlabeled wrappers
  std::optional<std::string> leaf;   // surface form at leaves
  std::vector<ConstituencyTree> children;

  /// Maximum number of labeled nodes on any root-to-leaf path.
  [[nodiscard]] int depth() const;
  friend bool operator==(const ConstituencyTree&, const ConstituencyTree&) = default;
};

struct AnnotatedTranscript {
  std::vector<Sentence> sentences;
  std::vector<std::string> sentence_texts;  // "# text =" comments, empty when absent
  std::optional<std::vector<ConstituencyTree>> trees;
  std::optional<std::vector<std::vector<double>>> embeddings;
  std::optional<std::string> raw_text;

  [[nodiscard]] std::size_t token_count() const noexcept;
  /// Non-PUNCT tokens; the word count used by every linguistic feature.
  [[nodiscard]] std::size_t word_count() const noexcept;
  [[nodiscard]] std::size_t sentence_count() const noexcept { return sentences.size(); }
  /// raw_text when present, else sentence texts, else forms joined by spaces.
  [[nodiscard]] std::string text() const;
};

class ParseError : public std::runtime_error {
 public:
  enum class Kind {
    ColumnCount,
    NonContiguousId,
    BadField,
    HeadOutOfRange,
    HeadCycle,
    MultipleRoots,
    UnbalancedParentheses,
    EmptyNode,
    MissingIndex,
    DimensionMismatch,
    NonFinite,
    CountMismatch,
  };
  ParseError(Kind kind, std::size_t line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        kind_(kind),
        line_(line) {}
  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

/// Parses CoNLL-U. Comments are ignored except "# text = ..."; multiword
/// ranges ("1-2") and empty nodes ("1.1") are skipped.
AnnotatedTranscript parse_conllu(std::string_view text);
std::string serialize_conllu(const AnnotatedTranscript& t);

/// Parses one or more Penn-style bracketed trees.
std::vector<ConstituencyTree> parse_bracketed(std::string_view text);
std::string serialize_bracketed(const ConstituencyTree& tree);

/// Reads a JSON-Lines sidecar of {"index": i, "vector": [...]} records,
/// returning vectors ordered by index 0..n-1.
std::vector<std::vector<double>> parse_embeddings(std::string_view jsonl);
std::vector<std::vector<double>> load_embeddings(const std::string& path);

/// Attaches trees/embeddings after checking one entry per sentence.
void attach_trees(AnnotatedTranscript& t, std::vector<ConstituencyTree> trees);
void attach_embeddings(AnnotatedTranscript& t, std::vector<std::vector<double>> embeddings);

std::string read_text_file(const std::string& path);

/// Loads a CoNLL-U file plus optional sidecars.
AnnotatedTranscript load_transcript(const std::string& conllu_path, const std::string& trees_path = {},
                                    const std::string& embeddings_path = {});

}  // namespace voicemark::transcript
