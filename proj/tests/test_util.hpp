#ifndef LISTREC_TESTS_TEST_UTIL_HPP
#define LISTREC_TESTS_TEST_UTIL_HPP

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <unistd.h>

namespace testutil {

// Scratch directory removed on scope exit.
class TempDir {
public:
    TempDir() {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("listrec-test-" + std::to_string(::getpid()) + "-" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

    std::string write(const std::string& name, std::string_view content) const {
        auto p = path_ / name;
        std::ofstream out(p, std::ios::binary);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        return p.string();
    }

private:
    std::filesystem::path path_;
};

// Minimal well-formedness check for the emitted SVG: every tag closes and
// nesting balances.
inline bool xml_well_formed(std::string_view xml) {
    std::vector<std::string> stack;
    std::size_t i = 0;
    while (i < xml.size()) {
        if (xml[i] != '<') {
            ++i;
            continue;
        }
        std::size_t end = xml.find('>', i);
        if (end == std::string_view::npos) return false;
        std::string_view tag = xml.substr(i + 1, end - i - 1);
        if (tag.empty()) return false;
        if (tag[0] == '?' || tag[0] == '!') {
            i = end + 1;
            continue;
        }
        bool closing = tag[0] == '/';
        bool self_closing = tag.back() == '/';
        std::string_view name = tag;
        if (closing) name.remove_prefix(1);
        if (self_closing) name.remove_suffix(1);
        auto sp = name.find_first_of(" \t\n");
        if (sp != std::string_view::npos) name = name.substr(0, sp);
        if (name.empty()) return false;
        if (closing) {
            if (stack.empty() || stack.back() != name) return false;
            stack.pop_back();
        } else if (!self_closing) {
            stack.emplace_back(name);
        }
        i = end + 1;
    }
    return stack.empty();
}

} // namespace testutil

#endif // LISTREC_TESTS_TEST_UTIL_HPP
