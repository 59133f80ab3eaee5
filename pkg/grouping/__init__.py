from grouping.groups import GroupStructure, build_groups, even_degree_indices, group_norms

__all__ = ["GroupStructure", "build_groups", "even_degree_indices", "group_norms"]
