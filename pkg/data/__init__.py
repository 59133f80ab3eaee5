from data.system_io import load_system, save_system, system_from_dict, system_to_dict

__all__ = ["load_system", "save_system", "system_from_dict", "system_to_dict"]
