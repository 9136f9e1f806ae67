#Detecta el tipo de archivo y utiliza el loader adecuado
#Almacena y gestiona las nubes cargadas
#Construye el corpus de bloques con la partición de clases train/test

import logging
from pathlib import Path
from typing import Any, Dict, List, MutableMapping, Optional, Sequence, Tuple, Union

import numpy as np

from .blocks import recenter_block, split_and_sample
from .data_loader import CloudLoaderFactory
from .episode_sampler import BlockCorpus, EpisodeSamplingError
from .point_cloud import PointCloud

logger = logging.getLogger(__name__)


class CorpusManager:
    """Clase para gestionar la carga de nubes y la construcción del corpus"""

    def __init__(self, store: Optional[MutableMapping[str, Any]] = None):
        """
        Inicializa el gestor.

        Args:
            store: Almacén de estado (p.ej. st.session_state); un dict nuevo si no se indica
        """
        self.store = store if store is not None else {}

        # Diccionario con las nubes cargadas; la clave es el nombre del archivo
        if 'loaded_clouds' not in self.store:
            self.store['loaded_clouds'] = {}

        #Nube actualmente seleccionada
        if 'current_file' not in self.store:
            self.store['current_file'] = None

    def load_file(self, file, **kwargs) -> Tuple[bool, str]:
        """
        Carga un archivo y almacena la nube.

        Args:
            file: Objeto de archivo con atributo name (Streamlit o abierto en binario)
            **kwargs: Argumentos específicos para cada tipo de cargador

        Returns:
            Tupla (éxito, mensaje)
        """
        try:
            if file is None:
                return False, "No se ha seleccionado ningún archivo"

            name = Path(file.name).name
            loader = CloudLoaderFactory.get_loader(name)

            if not loader.validate_file(file):
                return False, f"El archivo {name} no es válido para el formato seleccionado"

            cloud = loader.load_cloud(file, **kwargs)
            self.store['loaded_clouds'][name] = cloud
            self.store['current_file'] = name
            return True, f"Archivo {name} cargado correctamente ({len(cloud)} puntos)"

        except Exception as e:
            return False, f"Error al cargar el archivo: {str(e)}"

    def load_directory(self, directory: Union[str, Path], pattern: str = "*.epc") -> List[str]:
        """
        Carga todos los archivos de un directorio.

        Args:
            directory: Directorio a recorrer
            pattern: Patrón glob de los archivos

        Returns:
            Lista con los nombres cargados
        """
        loaded = []
        for path in sorted(Path(directory).glob(pattern)):
            with open(path, "rb") as fh:
                ok, message = self.load_file(fh)
            if ok:
                loaded.append(path.name)
            else:
                logger.warning(message)
        logger.info("Cargadas %d nubes desde %s", len(loaded), directory)
        return loaded

    def add_cloud(self, name: str, cloud: PointCloud) -> None:
        self.store['loaded_clouds'][name] = cloud
        self.store['current_file'] = name

    def get_loaded_files(self) -> List[str]:
        """
        Retorna la lista de archivos cargados.

        Returns:
            Lista con los nombres de los archivos cargados
        """
        return list(self.store['loaded_clouds'].keys())

    def select_file(self, file_name: str) -> Tuple[bool, str]:
        if file_name in self.store['loaded_clouds']:
            self.store['current_file'] = file_name
            return True, f"Archivo {file_name} seleccionado"
        else:
            return False, f"El archivo {file_name} no está cargado"

    def get_current_cloud(self) -> Optional[PointCloud]:
        current = self.store['current_file']
        return self.store['loaded_clouds'].get(current) if current else None

    def get_current_file(self) -> Optional[str]:
        return self.store['current_file']

    def class_table(self) -> Dict[int, str]:
        """Unión de las tablas de clases de todas las nubes cargadas"""
        table: Dict[int, str] = {}
        for cloud in self.store['loaded_clouds'].values():
            table.update(cloud.class_names)
        return table

    def build_corpus(self, block_size: float = 1.0, n_points: int = 2048, seed: int = 0,
                     test_fold: int = 0, background_classes: Sequence[int] = (0,),
                     min_fold_classes: int = 1) -> BlockCorpus:
        """
        Divide las nubes en bloques y reparte las clases en dos particiones disjuntas.

        Args:
            block_size: Lado del bloque
            n_points: Puntos por bloque
            seed: Semilla del muestreo de bloques
            test_fold: 0 -> la segunda mitad de las clases es test; 1 -> la primera
            background_classes: Clases que nunca forman parte de un episodio
            min_fold_classes: Clases de primer plano exigidas en cada partición

        Returns:
            BlockCorpus listo para muestrear episodios
        """
        if not self.store['loaded_clouds']:
            raise ValueError("No hay nubes cargadas para construir el corpus")
        rng = np.random.default_rng(seed)
        blocks: List[PointCloud] = []
        for name in sorted(self.store['loaded_clouds']):
            cloud = self.store['loaded_clouds'][name]
            blocks.extend(recenter_block(b) for b in split_and_sample(cloud, block_size, n_points, rng))

        foreground = sorted(c for c in self.class_table() if c not in set(background_classes))
        half = len(foreground) // 2
        first, second = foreground[:half], foreground[half:]
        train, test = (first, second) if test_fold == 0 else (second, first)
        if min(len(train), len(test)) < min_fold_classes:
            raise EpisodeSamplingError(
                f"Cada partición necesita al menos {min_fold_classes} clases de primer plano; "
                f"train {len(train)}, test {len(test)} (total {len(foreground)})")
        logger.info("Corpus: %d bloques, clases train %s, test %s", len(blocks), train, test)
        return BlockCorpus(blocks=blocks, class_names=self.class_table(), train_classes=train, test_classes=test)
