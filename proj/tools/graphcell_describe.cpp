// Copyright 2026 The Graphcell Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// graphcell-describe: decodes a packed fixture file and prints one line per
// primitive leaf: "path<TAB>type<TAB>value".

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "graphcell/codec/codec.hpp"
#include "graphcell/codec/fixtures.hpp"

namespace {

namespace codec = graphcell::codec;
namespace fs = std::filesystem;

constexpr int exit_config = 2;

using Describer = std::function<codec::Description(codec::Buffer&)>;

template <class T>
Describer describer() {
  return [](codec::Buffer& buf) { return codec::describe(codec::unpack_as<T>(buf)); };
}

const std::map<std::string, Describer>& describers() {
  static const std::map<std::string, Describer> table = {
      {"u8", describer<std::uint8_t>()},
      {"u16", describer<std::uint16_t>()},
      {"u32", describer<std::uint32_t>()},
      {"u64", describer<std::uint64_t>()},
      {"i8", describer<std::int8_t>()},
      {"i16", describer<std::int16_t>()},
      {"i32", describer<std::int32_t>()},
      {"i64", describer<std::int64_t>()},
      {"f32", describer<float>()},
      {"f64", describer<double>()},
      {"bool", describer<bool>()},
      {"string", describer<std::string>()},
      {"vector<u32>", describer<std::vector<std::uint32_t>>()},
      {"Pair", describer<codec::fixtures::Pair>()},
      {"Jellyfish", describer<codec::fixtures::Jellyfish>()},
      {"Golden", describer<codec::fixtures::Golden>()},
  };
  return table;
}

/// Looks up the type column for `file` in the manifest.txt beside it.
std::string manifest_type(const fs::path& file) {
  std::ifstream in(file.parent_path() / "manifest.txt");
  if (!in) return {};
  const std::string name = file.stem().string();
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string col0, col1;
    std::getline(ss, col0, '\t');
    std::getline(ss, col1, '\t');
    if (col0 == name) return col1;
  }
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  std::string file;
  std::string type;

  CLI::App app{"Print the descriptor paths of a packed fixture"};
  app.add_option("file", file, "packed fixture (.bin)")->required()->check(CLI::ExistingFile);
  app.add_option("--type", type, "value type; default: looked up in manifest.txt");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_config;
  }

  if (type.empty()) type = manifest_type(file);
  if (type.empty()) {
    std::cerr << "graphcell-describe: no --type given and " << file
              << " is not listed in a manifest.txt beside it\n";
    return exit_config;
  }
  auto it = describers().find(type);
  if (it == describers().end()) {
    std::cerr << "graphcell-describe: unknown type '" << type << "'; known:";
    for (const auto& [name, fn] : describers()) std::cerr << " " << name;
    std::cerr << "\n";
    return exit_config;
  }

  std::ifstream in(file, std::ios::binary);
  const std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<std::byte> bytes(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) bytes[i] = static_cast<std::byte>(raw[i]);

  try {
    codec::Buffer buf(std::move(bytes));
    const auto entries = it->second(buf);
    if (buf.remaining() != 0) {
      std::cerr << "graphcell-describe: " << buf.remaining() << " trailing bytes after " << type
                << "\n";
      return 1;
    }
    for (const auto& e : entries) std::cout << e.path << '\t' << e.type << '\t' << e.value << '\n';
  } catch (const graphcell::Error& e) {
    std::cerr << "graphcell-describe: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
