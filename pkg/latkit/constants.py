from enum import Enum


class Constants(Enum):
    # search and size limits
    MAX_GROUP_ORDER = 10000000
    FQM_SIZE_BOUND = 65536
    MAX_SEARCH_NODES = 50000000
    MAX_ARF_GENUS = 3
    MAX_DEFINITE_RANK = 8
    # FQM element pairs tabulated eagerly up to this group order
    FQM_TABLE_ORDER = 1024

    # claim provenance tags
    PROVENANCE_PAPER = 'PAPER'
    PROVENANCE_TRIVIAL = 'TRIVIAL'
    PROVENANCE_DERIVED = 'DERIVED'

    # parity labels
    EVEN = 'even'
    ODD = 'odd'

    # cli exit codes
    EXIT_OK = 0
    EXIT_VERIFICATION_FAILED = 1
    EXIT_INPUT_ERROR = 2
    EXIT_RESOURCE_LIMIT = 3

    SCENARIOS = ('genus3', 'genus4', 'cubic-surface-weyl', 'cubic-threefold-hodge',
                 'cubic-fourfold-hodge', 'nikulin-glue-smoke', 'minus-id-residues',
                 'components-odd-odd')

    ERR_NOT_SYMMETRIC = 'Gram matrix is not symmetric.'
    ERR_DEGENERATE = 'Gram matrix is degenerate.'
    ERR_NOT_DEFINITE = 'Lattice is not definite.'
