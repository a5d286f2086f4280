// Regenerates the text fixtures: fixturegen <dir>
#include <fstream>
#include <iostream>

#include "opgroth/fixtures.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: fixturegen <dir>\n";
    return 2;
  }
  const std::string dir = argv[1];
  auto put = [&](const std::string& name, const std::string& text) {
    std::ofstream os(dir + "/" + name, std::ios::binary);
    if (!(os << text)) {
      std::cerr << "cannot write " << dir << "/" << name << "\n";
      std::exit(2);
    }
  };
  for (const auto& [name, doc] : opgroth::fixtures::shipped_documents()) put(name, opgroth::write_spec(doc));
  for (const auto& v : opgroth::fixtures::broken_variants()) put(v.file, opgroth::fixtures::variant_text(v));
  return 0;
}
