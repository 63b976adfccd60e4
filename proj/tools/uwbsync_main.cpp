// SPDX-License-Identifier: Apache-2.0
//
// uwbsync: timing acquisition simulator for multi-user TH-PAM impulse radio
// ------------------------------------------------------------------------

#include "uwbsync/cli.hpp"

int main(int argc, char **argv)
{
    return uwbsync::run_cli(argc, argv);
}
