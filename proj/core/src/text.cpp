#include "perceptlab/text.hpp"

#include <cctype>

#include "perceptlab/errors.hpp"

namespace perceptlab {

namespace {

const char* kMarkers[] = {"<bos>", "<eos>", "<unk>", "<image>"};

bool is_punct_token(const std::string& t) {
    return t.size() == 1 && (t[0] == '.' || t[0] == ',' || t[0] == '?' || t[0] == ';' ||
                             t[0] == ':' || t[0] == '!');
}

}  // namespace

std::string render_prompt(PromptMode mode) {
    std::string p = "Looking at the <image> above, what is the synthetic distortion in the image?";
    if (mode == PromptMode::baseline_options) {
        p += " Select from the following options: 1. Blur; 2. Noise; 3. Brightness;"
             " 4. Compression; 5. Contrast; 6. Colorfulness; 7. Jitter; 8. Clean";
    }
    return p;
}

std::string render_answer(DistortionClass cls) {
    return "The image has some " + class_word(cls) + ".";
}

std::vector<std::string> segment_words(const std::string& text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '<') {
            bool matched = false;
            for (const char* m : kMarkers) {
                std::size_t len = std::char_traits<char>::length(m);
                if (text.compare(i, len, m) == 0) {
                    out.emplace_back(m);
                    i += len;
                    matched = true;
                    break;
                }
            }
            if (matched) continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            std::string w;
            while (j < text.size() && std::isalpha(static_cast<unsigned char>(text[j]))) {
                w.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[j]))));
                ++j;
            }
            out.push_back(std::move(w));
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            out.push_back(text.substr(i, j - i));
            i = j;
            continue;
        }
        // Single punctuation mark or unknown byte.
        out.push_back(std::string(1, c));
        ++i;
    }
    return out;
}

Vocabulary::Vocabulary() {
    auto add = [&](const std::string& w) {
        if (index_.count(w) == 0) {
            index_[w] = static_cast<int>(tokens_.size());
            tokens_.push_back(w);
        }
    };
    add("<bos>");
    add("<eos>");
    add("<unk>");
    add("<image>");
    bos_ = index_["<bos>"];
    eos_ = index_["<eos>"];
    unk_ = index_["<unk>"];
    image_ = index_["<image>"];

    std::vector<std::string> sources = {render_prompt(PromptMode::finetune),
                                        render_prompt(PromptMode::baseline_options)};
    for (DistortionClass c : all_classes()) sources.push_back(render_answer(c));
    for (const std::string& s : sources)
        for (const std::string& w : segment_words(s)) add(w);

    for (DistortionClass c : all_classes()) {
        class_ids_[static_cast<int>(c)] = index_.at(class_word(c));
    }
    if (size() > 64) throw ConfigError("vocabulary exceeded 64 tokens");
}

const Vocabulary& Vocabulary::standard() {
    static const Vocabulary v;
    return v;
}

const std::string& Vocabulary::word_of(int id) const {
    if (id < 0 || id >= size()) throw DataError("token id out of range: " + std::to_string(id));
    return tokens_[static_cast<std::size_t>(id)];
}

int Vocabulary::find(const std::string& word) const {
    auto it = index_.find(word);
    return it == index_.end() ? -1 : it->second;
}

std::vector<int> Vocabulary::tokenize(const std::string& text) const {
    std::vector<int> ids;
    for (const std::string& w : segment_words(text)) {
        int id = find(w);
        ids.push_back(id < 0 ? unk_ : id);
    }
    return ids;
}

std::string Vocabulary::detokenize(const std::vector<int>& ids) const {
    std::string out;
    for (int id : ids) {
        const std::string& w = word_of(id);
        if (!out.empty() && !is_punct_token(w)) out.push_back(' ');
        out += w;
    }
    return out;
}

}  // namespace perceptlab
