#include "app.hpp"

int main(int argc, char** argv) {
    return isac::cli::app_main({argv + 1, argv + argc});
}
