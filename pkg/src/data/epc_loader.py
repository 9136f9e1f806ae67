#Especializada en el formato binario EPC (little-endian)
#magic "EPC1", u32 M, u32 C, C entradas {u16 id, u16 len, nombre utf-8}
#y M registros {f32 x,y,z, f32 r,g,b, i32 label}

import io
import struct
from pathlib import Path
from typing import BinaryIO, Dict, Union

import numpy as np

from .data_loader import CloudLoader
from .point_cloud import PointCloud

MAGIC = b"EPC1"
RECORD = np.dtype([("xyz", "<f4", (3,)), ("rgb", "<f4", (3,)), ("label", "<i4")])


class CloudFormatError(ValueError):
    """Archivo EPC mal formado; offset indica el byte del problema"""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte {offset})")
        self.offset = offset


def encode_cloud(cloud: PointCloud) -> bytes:
    """Serializa una nube al formato EPC"""
    buffer = io.BytesIO()
    buffer.write(MAGIC)
    buffer.write(struct.pack("<II", len(cloud), len(cloud.class_names)))
    for class_id in sorted(cloud.class_names):
        name = cloud.class_names[class_id].encode("utf-8")
        buffer.write(struct.pack("<HH", class_id, len(name)))
        buffer.write(name)
    records = np.zeros(len(cloud), dtype=RECORD)
    records["xyz"] = cloud.xyz
    records["rgb"] = cloud.rgb
    records["label"] = cloud.labels
    buffer.write(records.tobytes())
    return buffer.getvalue()


def decode_cloud(payload: bytes) -> PointCloud:
    """
    Deserializa una nube EPC.

    Args:
        payload: Bytes del archivo

    Returns:
        PointCloud con coordenadas y colores en float64
    """
    if payload[:4] != MAGIC:
        raise CloudFormatError("Magic inválido, se esperaba EPC1", 0)
    if len(payload) < 12:
        raise CloudFormatError("Cabecera truncada", len(payload))
    m, c = struct.unpack_from("<II", payload, 4)
    if m == 0:
        raise CloudFormatError("La nube no tiene puntos (M = 0)", 4)

    offset = 12
    class_names: Dict[int, str] = {}
    for _ in range(c):
        if offset + 4 > len(payload):
            raise CloudFormatError("Tabla de clases truncada", offset)
        class_id, name_len = struct.unpack_from("<HH", payload, offset)
        if offset + 4 + name_len > len(payload):
            raise CloudFormatError("Nombre de clase truncado", offset + 4)
        class_names[class_id] = payload[offset + 4:offset + 4 + name_len].decode("utf-8")
        offset += 4 + name_len

    expected = offset + m * RECORD.itemsize
    if len(payload) < expected:
        raise CloudFormatError(f"Datos truncados: se esperaban {m} registros", len(payload))
    records = np.frombuffer(payload, dtype=RECORD, count=m, offset=offset)

    labels = records["label"].astype(np.int64)
    bad = np.flatnonzero((labels != -1) & ~np.isin(labels, list(class_names)))
    if bad.size:
        first = int(bad[0])
        raise CloudFormatError(f"Etiqueta {labels[first]} fuera de la tabla de clases",
                               offset + first * RECORD.itemsize + RECORD.fields["label"][1])

    return PointCloud(records["xyz"].astype(np.float64), records["rgb"].astype(np.float64),
                      labels, class_names)


def read_cloud(path: Union[str, Path]) -> PointCloud:
    with open(path, "rb") as fh:
        return decode_cloud(fh.read())


def write_cloud(cloud: PointCloud, path: Union[str, Path]) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_cloud(cloud))


class EPCLoader(CloudLoader):
    """Cargador específico para archivos epc"""

    def validate_file(self, file_obj: BinaryIO) -> bool:
        """
        Valida el magic del archivo.

        Args:
            file_obj: Objeto de archivo a validar

        Returns:
            True si empieza por EPC1
        """
        try:
            pos = file_obj.tell()
            head = file_obj.read(4)
            file_obj.seek(pos)
            return head == MAGIC
        except Exception:
            return False

    def load_cloud(self, file_obj: BinaryIO, **kwargs) -> PointCloud:
        return decode_cloud(file_obj.read())
