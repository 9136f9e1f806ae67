from .cloud_explorer import CloudExplorer, cloud_to_frame
from .spectrum import morton_order, spectrum_profile, spectrum_export, high_band_fraction, export_features
from .param_report import param_count_report

__all__ = ['CloudExplorer', 'cloud_to_frame', 'morton_order', 'spectrum_profile', 'spectrum_export',
           'high_band_fraction', 'export_features', 'param_count_report']
