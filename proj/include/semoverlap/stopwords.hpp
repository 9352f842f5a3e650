#pragma once

#include <array>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_set>

#include "semoverlap/error.hpp"

namespace semoverlap {

using StopwordSet = std::unordered_set<std::string>;

// English list as distributed with NLTK.
inline constexpr auto kEnglishStopwords = std::to_array<std::string_view>({
    "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "you're", "you've",
    "you'll", "you'd", "your", "yours", "yourself", "yourselves", "he", "him", "his", "himself",
    "she", "she's", "her", "hers", "herself", "it", "it's", "its", "itself", "they", "them",
    "their", "theirs", "themselves", "what", "which", "who", "whom", "this", "that", "that'll",
    "these", "those", "am", "is", "are", "was", "were", "be", "been", "being", "have", "has",
    "had", "having", "do", "does", "did", "doing", "a", "an", "the", "and", "but", "if", "or",
    "because", "as", "until", "while", "of", "at", "by", "for", "with", "about", "against",
    "between", "into", "through", "during", "before", "after", "above", "below", "to", "from",
    "up", "down", "in", "out", "on", "off", "over", "under", "again", "further", "then", "once",
    "here", "there", "when", "where", "why", "how", "all", "any", "both", "each", "few", "more",
    "most", "other", "some", "such", "no", "nor", "not", "only", "own", "same", "so", "than",
    "too", "very", "s", "t", "can", "will", "just", "don", "don't", "should", "should've", "now",
    "d", "ll", "m", "o", "re", "ve", "y", "ain", "aren", "aren't", "couldn", "couldn't", "didn",
    "didn't", "doesn", "doesn't", "hadn", "hadn't", "hasn", "hasn't", "haven", "haven't", "isn",
    "isn't", "ma", "mightn", "mightn't", "mustn", "mustn't", "needn", "needn't", "shan", "shan't",
    "shouldn", "shouldn't", "wasn", "wasn't", "weren", "weren't", "won", "won't", "wouldn",
    "wouldn't",
});

inline StopwordSet english_stopwords() {
    StopwordSet words;
    for (auto w : kEnglishStopwords)
        words.emplace(w);
    return words;
}

/// One token per line; blank lines and lines starting with '#' are ignored.
inline StopwordSet load_stopwords(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::io, "cannot open stopword file " + path);
    StopwordSet words;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        const auto last = line.find_last_not_of(" \t\r");
        words.insert(line.substr(first, last - first + 1));
    }
    return words;
}

} // namespace semoverlap
