#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "perceptlab/distortion.hpp"

namespace perceptlab {

enum class PromptMode { finetune, baseline_options };

// The training prompt, verbatim; baseline mode appends the closed-set
// option list used for the untrained model.
std::string render_prompt(PromptMode mode);

// "The image has some {word}." with the lowercase class word.
std::string render_answer(DistortionClass cls);

// Word-level vocabulary closed over the conversation templates.
// Ids are dense 0..size-1; markers first, then words in first-appearance
// order over the templates.
class Vocabulary {
public:
    static const Vocabulary& standard();

    int size() const { return static_cast<int>(tokens_.size()); }
    const std::vector<std::string>& tokens() const { return tokens_; }
    const std::string& word_of(int id) const;
    // Id for a known word; -1 when absent.
    int find(const std::string& word) const;

    int bos() const { return bos_; }
    int eos() const { return eos_; }
    int unk() const { return unk_; }
    int image_token() const { return image_; }
    int class_token(DistortionClass c) const { return class_ids_[static_cast<int>(c)]; }

    // Lowercase word/punctuation segmentation; unknown words map to <unk>.
    std::vector<int> tokenize(const std::string& text) const;
    // Inverse up to normalization: lowercased, canonical spacing.
    std::string detokenize(const std::vector<int>& ids) const;

private:
    Vocabulary();
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int> index_;
    int bos_ = -1, eos_ = -1, unk_ = -1, image_ = -1;
    int class_ids_[kNumClasses] = {};
};

// Raw segmentation (no vocabulary): lowercased words, digit runs,
// punctuation marks, and the literal markers <image>/<bos>/<eos>/<unk>.
std::vector<std::string> segment_words(const std::string& text);

}  // namespace perceptlab
