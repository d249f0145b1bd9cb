#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "sasdp/detail/sha256.hpp"

TEST_CASE("sha256 test vectors") {
  using sasdp::detail::sha256_hex;
  CHECK(sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
  // block-boundary lengths
  const std::string a55(55, 'a'), a56(56, 'a'), a64(64, 'a'), a65(65, 'a');
  CHECK(sha256_hex(a55) ==
        "9f4390f8d30c2dd92ec9f095b65e2b9ae9b0a925a5258e241c9f1e910f734318");
  CHECK(sha256_hex(a64) ==
        "ffe054fe7ae0cb6dc65c3af9b61d5209f439851db43d0ba5997337df154668eb");
}
