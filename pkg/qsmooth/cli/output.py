"""
Result files: CSV tables stamped with the config hash, and the xarray
result store (netCDF or zarr, picked by extension).
"""
import logging
import os

import netCDF4
import zarr

from .._version import __version__

__all__ = ['ensure_dir', 'write_csv', 'ResultStore']

log = logging.getLogger(__name__)


def ensure_dir(path):
    if os.path.exists(path) and not os.path.isdir(path):
        raise ValueError(f"Output path {path} exists and is not a directory")
    os.makedirs(path, exist_ok=True)
    return path


def write_csv(df, path, config_sha256):
    """Write ``df`` after a comment line recording the config hash and version."""
    with open(path, 'w', newline='') as f:
        f.write('# config_sha256=%s qsmooth=%s\n' % (config_sha256, __version__))
        df.to_csv(f, index=False)
    log.info('wrote %s (%d rows)', path, len(df))
    return path


class ResultStore(object):
    """Grouped result file; ``.nc`` goes through netCDF4, ``.zarr`` through zarr."""

    def __init__(self, file_path):
        self.file_path = file_path
        _, self.format = os.path.splitext(file_path)
        if self.format not in ('.nc', '.zarr'):
            raise ValueError(f"Unsupported result format '{self.format}', use .nc or .zarr")

    def set_toplevel(self, attrs):
        """Create the file with top-level attributes, replacing any previous one."""
        if self.format == '.nc':
            with netCDF4.Dataset(self.file_path, 'w', format='NETCDF4') as ncfile:
                for k, v in attrs.items():
                    ncfile.setncattr(k, v)
        else:
            store = zarr.open(self.file_path, mode='w')
            for k, v in attrs.items():
                store.attrs[k] = v

    def set_group(self, name, ds):
        """Append an xarray Dataset as group ``name``."""
        if self.format == '.nc':
            ds.to_netcdf(path=self.file_path, mode='a', group=name)
        else:
            ds.to_zarr(store=self.file_path, mode='a', group=name)
        log.info('wrote group %s to %s', name, self.file_path)
