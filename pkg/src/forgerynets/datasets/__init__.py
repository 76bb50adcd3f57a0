from .container import dataset_nbytes, read_dataset, write_dataset
from .forgery import ForgeryDataset
from .records import FAKE, FAKE_FAMILIES, REAL, Family, SampleRecord
from .synthetic import forge, gen_fake, gen_real, gen_split, real_content
